"""Named, deterministic end-to-end checks run by the command-line harness.

Each scenario takes a parameter record and a seeded ``random.Random`` and
returns ``(status, payload)`` with status ``pass``, ``fail`` or ``cap``.  The
payload must be a pure function of the parameters and the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .detect import (
    chain_closure,
    constructive_measure_chain,
    decide_mixing,
    decide_shadowing,
    decide_transitive,
    find_chain,
    interpolation_steps,
    jsonable,
    sample_ball,
    sensitivity_times,
    unshadowed,
    verify_arc_order_obstruction,
    verify_ball_separation,
    verify_shift_convergence,
    verify_two_point_nonshadowing,
)
from .entropy import entropy_estimate, induced_entropy_growth
from .measure import (
    DiscreteMeasure,
    dirac,
    mix,
    prohorov_bruteforce,
    prohorov_fast,
    pushforward,
)
from .space import as_fraction, build_space
from .systems import build_zoo, fm_map, identity, induced, induced_uniform_distance, uniform_distance


@dataclass(frozen=True)
class Scenario:
    name: str
    claim: str
    expected: str
    defaults: dict
    run: Callable = field(repr=False)


REGISTRY: dict = {}


def scenario(name: str, claim: str, expected: str, **defaults):
    def wrap(fn):
        REGISTRY[name] = Scenario(name, claim, expected, defaults, fn)
        return fn
    return wrap


def random_measure(rng: random.Random, space, max_support: int, denom: int = 12,
                   points=None) -> DiscreteMeasure:
    pool = list(space.points if points is None else points)
    k = rng.randint(1, min(max_support, len(pool)))
    pts = rng.sample(pool, k)
    w = [rng.randint(1, denom) for _ in pts]
    total = sum(w)
    return DiscreteMeasure.from_pairs(space, [(p, Fraction(c, total)) for p, c in zip(pts, w)])


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# distance ---------------------------------------------------------------


def oracle_spaces():
    line = [Fraction(c, 7) for c in (0, 1, 3, 4, 7)]
    finite = build_space({"kind": "finite", "points": [f"p{i}" for i in range(5)],
                          "distances": [[abs(a - b) for b in line] for a in line]})
    return {"finite5": finite,
            "interval16": build_space({"kind": "interval", "lo": 0, "hi": 1, "q": 16}),
            "zinf5": build_space({"kind": "zinf", "N": 5})}


@scenario("prohorov_oracle", "min-cut Prohorov distance equals subset enumeration",
          "zero mismatches on every space", trials=200, max_support=6)
def _prohorov_oracle(p, rng):
    out = {}
    ok = True
    for name, sp in oracle_spaces().items():
        bad = []
        for t in range(p["trials"]):
            mu = random_measure(rng, sp, p["max_support"])
            nu = random_measure(rng, sp, p["max_support"])
            a, b = prohorov_fast(mu, nu), prohorov_bruteforce(mu, nu)
            if a != b:
                bad.append({"trial": t, "mu": mu, "nu": nu, "fast": a, "brute": b})
        out[name] = {"pairs": p["trials"], "mismatches": bad[:5], "mismatch_count": len(bad)}
        ok = ok and not bad
    return _status(ok), out


@scenario("prohorov_metric_laws", "Dirac identity, pushforward linearity and the convexity bound",
          "zero failures and the tight convexity case equals 1/2", trials=200, mixes=100)
def _metric_laws(p, rng):
    sp = build_space({"kind": "interval", "lo": 0, "hi": 2, "q": 19})
    dirac_bad = [(x, y) for x in sp.points for y in sp.points
                 if prohorov_fast(dirac(sp, x), dirac(sp, y)) != min(sp.distance(x, y), 1)]
    f = build_zoo("fig1", q=16).map_at(0)
    fsp = f.space
    lin_bad = 0
    for _ in range(p["mixes"]):
        k = rng.randint(2, 4)
        ms = [random_measure(rng, fsp, 4) for _ in range(k)]
        w = [rng.randint(1, 9) for _ in ms]
        cs = [Fraction(c, sum(w)) for c in w]
        lhs = pushforward(f, mix(list(zip(cs, ms))))
        rhs = mix([(c, pushforward(f, m)) for c, m in zip(cs, ms)])
        lin_bad += lhs != rhs
    conv_bad = 0
    for _ in range(p["trials"]):
        mu, nu = random_measure(rng, fsp, 4), random_measure(rng, fsp, 4)
        a, b = sorted(Fraction(rng.randint(0, 20), 20) for _ in range(2))
        left = mix([(a, mu), (1 - a, nu)]) if 0 < a < 1 else (mu if a == 1 else nu)
        right = mix([(b, mu), (1 - b, nu)]) if 0 < b < 1 else (mu if b == 1 else nu)
        conv_bad += prohorov_fast(left, right) > b - a
    two = build_space({"kind": "finite", "points": ["a", "b"], "distances": "discrete"})
    tight = prohorov_fast(dirac(two, "b"), mix([(Fraction(1, 2), dirac(two, "a")), (Fraction(1, 2), dirac(two, "b"))]))
    ok = not dirac_bad and not lin_bad and not conv_bad and tight == Fraction(1, 2)
    return _status(ok), {"dirac_pairs": len(sp) ** 2, "dirac_failures": dirac_bad[:5],
                         "linearity_failures": lin_bad, "convexity_failures": conv_bad, "tight_case": tight}


# chains and shadowing ---------------------------------------------------


@scenario("constructive_chains", "explicit eps-chains between any two measures of a surjective system",
          "every chain validates; interpolation hops <= eps/2, tail hops 0, exact endpoints",
          extra_lengths=6, fig1_pairs=20, fig1_q=8, fig1_eps="2/5")
def _constructive(p, rng):
    report = []
    ok = True
    swap = build_zoo("swap2")
    sp = swap.space
    for eps in (Fraction(1, 2), Fraction(1, 4)):
        N = interpolation_steps(eps)
        for k in range(N, N + p["extra_lengths"] + 1):
            mu, nu = dirac(sp, "a"), dirac(sp, "b")
            c = constructive_measure_chain(induced(swap), mu, nu, eps, k)
            good = (c.valid and c.states[0] == mu and c.states[-1] == nu
                    and all(h <= eps / 2 for h in c.hop_slacks[:N])
                    and all(h == 0 for h in c.hop_slacks[N:]))
            ok = ok and good
            report.append({"system": "swap2", "eps": eps, "k": k, "ok": good, "max_hop": max(c.hop_slacks)})
    # The fig1 map on a coarse grid is not surjective (slope-2 laps skip odd
    # grid points), so the chain is built on the refinement q * 2**k, where
    # every k-step preimage of a coarse grid point exists exactly.
    eps = as_fraction(p["fig1_eps"])
    N = interpolation_steps(eps)
    coarse = p["fig1_q"]
    for t in range(p["fig1_pairs"]):
        k = N + t % 4
        fig = build_zoo("fig1", q=coarse * 2**k)
        fsp = fig.space
        pts = fsp.points[::2**k]
        mu, nu = random_measure(rng, fsp, 4, points=pts), random_measure(rng, fsp, 4, points=pts)
        c = constructive_measure_chain(induced(fig), mu, nu, eps, k)
        good = (c.valid and c.states[0] == mu and c.states[-1] == nu
                and all(h <= eps / 2 for h in c.hop_slacks[:N]) and all(h == 0 for h in c.hop_slacks[N:]))
        ok = ok and good
        report.append({"system": "fig1", "grid": coarse * 2**k, "eps": eps, "k": k, "ok": good,
                       "max_hop": max(c.hop_slacks)})
    return _status(ok), {"chains": report}


@scenario("two_point_nonshadowing", "induced swap on two points has a pseudo-orbit no measure shadows",
          "closed-form check holds; shadowing decider fails on M_q with a re-validating witness",
          delta="1/10", eps="6/25", q=20, grid=1000)
def _nonshadowing(p, rng):
    delta = as_fraction(p["delta"])
    closed = verify_two_point_nonshadowing(delta, p["grid"])
    swap = build_zoo("swap2")
    ind = decide_shadowing(induced(swap), delta, p["eps"], q=p["q"])
    if ind.status == "unknown":
        return "cap", {"closed_form": closed, "induced_shadowing": ind}
    recheck = ind.fails and unshadowed(induced(swap), ind.witness["pseudo_orbit"], delta, p["eps"], q=p["q"])
    base = decide_shadowing(swap, Fraction(1, 2), Fraction(1, 2))
    ok = closed.holds and ind.fails and recheck and base.holds
    return _status(ok), {"closed_form": closed, "induced_shadowing": ind, "witness_rechecked": recheck,
                         "base_shadowing": base}


@scenario("chain_obstructions", "no delta-chain escapes the trapping region of two interval maps",
          "reachability closures miss the target; find_chain returns none", grids=[16, 64])
def _obstructions(p, rng):
    out = []
    ok = True
    for q in p["grids"]:
        for name, x0, y0, d0 in (("ex34", 0, Fraction(2, 3), Fraction(3, 10)),
                                 ("ex35", Fraction(1, 2), 1, Fraction(1, 4))):
            sys_ = build_zoo(name, q=q)
            sp = sys_.space
            x, y = sp.snap(x0), sp.snap(y0)
            reach = chain_closure(sys_, x, d0)
            chain = find_chain(sys_, x, y, d0)
            good = y not in reach and chain is None
            ok = ok and good
            out.append({"system": name, "q": q, "x": x, "y": y, "delta": d0, "ok": good,
                        "closure_max": max(reach)})
    return _status(ok), {"cases": out}


@scenario("swap_recurrence", "the two-point swap is transitive but not mixing",
          "transitive holds, mixing fails with a witness")
def _swap_recurrence(p, rng):
    swap = build_zoo("swap2")
    t, m = decide_transitive(swap), decide_mixing(swap)
    return _status(t.holds and m.fails), {"transitive": t, "mixing": m}


# separation, sensitivity, convergence -----------------------------------


@scenario("ball_separation", "a small measure ball around delta_{-1/2} never reaches the mu_2 ball",
          "holds with every sampled ball mass on [0,1] at most eps0",
          eps0="1/5", eps="1/4", horizon=50, samples=200, q=40, grid=64)
def _separation(p, rng):
    v = verify_ball_separation(p["eps0"], p["eps"], p["horizon"], p["samples"], p["q"], p["grid"],
                               seed=rng.randrange(2**32))
    return _status(v.holds), {"verdict": v}


@scenario("sensitivity_inclusion", "measure-level sensitivity times sit inside point-level ones at half the gap",
          "zero inclusion violations", trials=20, horizon=100, candidates=30, q=20)
def _sensitivity(p, rng):
    cases = []
    bad = 0
    for name in ("fig1", "swap2"):
        sys_ = build_zoo(name, q=64) if name == "fig1" else build_zoo(name)
        sp = sys_.space
        ind = induced(sys_)
        for _ in range(p["trials"]):
            x = rng.choice(sp.points)
            e = Fraction(rng.randint(1, 8), 20)
            d = e + Fraction(rng.randint(1, 8), 20)
            cands, _ = sample_ball(sp, x, e, p["q"], p["candidates"], rng)
            cands = [nu for nu in cands if nu != dirac(sp, x)]
            if not cands:
                cases.append({"system": name, "x": x, "eps": e, "delta": d, "skipped": "ball empty at this resolution"})
                continue
            meas = sensitivity_times(ind, dirac(sp, x), e, d, p["horizon"], cands)
            try:
                pts = sensitivity_times(sys_, x, e, d / 2, p["horizon"])
                members = set(pts.members)
            except ValueError:
                members = set()
            extra = sorted(set(meas.members) - members)
            bad += bool(extra)
            cases.append({"system": name, "x": x, "eps": e, "delta": d, "measure_times": len(meas),
                          "point_times": len(members), "violations": extra[:5]})
    return _status(bad == 0), {"cases": cases, "violations": bad}


@scenario("entropy", "separated-set growth: zero for finite permutations, about (1/2)log 2 for fig1",
          "identity and swap2 give 0; fig1 in [0.28, 0.42]; Dirac embedding inequality holds",
          q=4096, n_max=14, lo=0.28, hi=0.42)
def _entropy(p, rng):
    ident = build_zoo("identity", space={"kind": "interval", "lo": 0, "hi": 1, "q": 64})
    e_id = entropy_estimate(ident, None, [Fraction(1, 100), Fraction(1, 10)], range(1, 9)).estimate
    swap = build_zoo("swap2")
    e_sw = entropy_estimate(swap, None, [Fraction(1, 2), Fraction(1, 10)], range(1, 9)).estimate
    fig = build_zoo("fig1", q=p["q"])
    est = entropy_estimate(fig, None, [Fraction(1, 2**k) for k in range(4, 9)], range(1, p["n_max"] + 1))
    growth = [induced_entropy_growth(swap, [2, 4, 8], None, Fraction(1, 4), 3),
              induced_entropy_growth(build_zoo("fig1", q=4), [1, 2, 3], None, Fraction(1, 4), 4)]
    ok = (e_id == 0 and e_sw == 0 and p["lo"] <= est.estimate <= p["hi"]
          and all(g["embedding_holds"] and g["monotone"] for g in growth))
    return _status(ok), {"identity": e_id, "swap2": e_sw, "fig1": round(est.estimate, 12),
                         "fig1_per_eps": {str(k): round(v, 12) for k, v in est.per_eps.items()},
                         "induced_growth": growth, "fig1_curve": est.rows}


@scenario("shift_convergence", "pushforwards under the truncated shift converge to delta_inf",
          "distance 0 from time 2N+1 on; checkpoints non-increasing", N=10, samples=50)
def _shift(p, rng):
    v = verify_shift_convergence(p["N"], samples=p["samples"], seed=rng.randrange(2**32))
    return _status(v.holds), {"verdict": v}


@scenario("schedule_uniform", "connect-the-dots maps approach the identity at both levels",
          "uniform distance to the identity shrinks with m; induced distance never exceeds it; "
          "separated-set growth along the schedule is flat at fixed resolution",
          q=64, depth=6, measures=30)
def _schedule(p, rng):
    sp = build_space({"kind": "interval", "lo": 0, "hi": 1, "q": p["q"]})
    idm = identity(sp)
    ms = [random_measure(rng, sp, 5) for _ in range(p["measures"])]
    rows = []
    for m in range(1, p["depth"] + 1):
        f = fm_map(sp, m)
        rows.append({"m": m, "base": uniform_distance(f, idm), "induced": induced_uniform_distance(f, idm, ms)})
    shrinking = all(b["base"] <= a["base"] for a, b in zip(rows, rows[1:]))
    dominated = all(r["induced"] <= r["base"] for r in rows)
    sched = build_zoo("fm_schedule", q=p["q"], depth=4)
    est = entropy_estimate(sched, None, [Fraction(1, 8), Fraction(1, 16)], range(1, 31))
    flat = {str(e): [est.s(e, n) for n in range(1, 31)] for e in (Fraction(1, 8), Fraction(1, 16))}
    return _status(shrinking and dominated and est.estimate == 0), {
        "rows": rows, "blocks": sched.meta["blocks"], "separated_growth": flat, "growth_rate": est.estimate}


@scenario("circle_arc_order", "three-arc order obstruction for the circle word system (bounded horizon)",
          "no counterexample time within the horizon", q=64, horizon=60)
def _circle(p, rng):
    v = verify_arc_order_obstruction(p["q"], p["horizon"])
    return _status(not v.fails), {"verdict": v}


def coerce(name: str, key: str, raw: str):
    """Type-check an override against the scenario default."""
    sc = REGISTRY[name]
    if key not in sc.defaults:
        raise KeyError(f"scenario {name!r} has no parameter {key!r}; known: {sorted(sc.defaults)}")
    default = sc.defaults[key]
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, list):
        return [int(v) for v in raw.split(",")]
    as_fraction(raw)
    return raw


def run(name: str, overrides: dict | None = None, seed: int = 0) -> tuple:
    """``(status, params, payload)`` for one scenario."""
    sc = REGISTRY[name]
    params = {**sc.defaults, **(overrides or {})}
    rng = random.Random(f"{seed}:{name}")
    status, payload = sc.run(params, rng)
    return status, params, jsonable(payload)
