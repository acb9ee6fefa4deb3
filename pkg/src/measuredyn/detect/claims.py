"""Checks of specific separation and convergence claims on the example systems."""

from __future__ import annotations

import random
from fractions import Fraction

from ..measure import DiscreteMeasure, dirac, from_counts, mass, mix, prohorov_fast, pushforward
from ..space import INF, as_fraction
from ..systems import build_zoo
from .types import PropertyVerdict


def _random_counts(rng: random.Random, pool: list, units: int, counts: list):
    for _ in range(units):
        counts[rng.choice(pool)] += 1


def sample_ball(space, center, radius, q: int, size: int, rng: random.Random, max_tries: int = 100):
    """Random measures of ``M_q`` with ``P(nu, delta_center) < radius`` (rejection sampling).

    Most units go on points within ``radius`` of the center and a minority
    anywhere; every sample is filtered through the exact distance.
    """
    radius = as_fraction(radius)
    target = dirac(space, center)
    near = [i for i, p in enumerate(space.points) if space.distance(p, center) < radius]
    out, rejected = [], 0
    while len(out) < size:
        for _ in range(max_tries):
            stray = rng.randint(0, int(radius * q))
            counts = [0] * len(space)
            _random_counts(rng, near, q - stray, counts)
            _random_counts(rng, list(range(len(space))), stray, counts)
            nu = from_counts(space, counts)
            if prohorov_fast(nu, target) < radius:
                out.append(nu)
                break
            rejected += 1
        else:
            raise RuntimeError("ball sampling keeps failing; radius too small for this grid")
    return out, rejected


def verify_ball_separation(eps0=0.2, eps=0.25, horizon: int = 50, sample_size: int = 200,
                           q: int = 40, grid: int = 64, seed: int = 0) -> PropertyVerdict:
    """The orbit of a small ball around ``delta_{-1/2}`` never comes ``eps``-close to ``mu_2``.

    On the fig1 grid, every sampled ``nu`` with ``P(nu, delta_{-1/2}) < eps0``
    is checked for ``nu([0, 1]) <= eps0`` and for ``P(f^n nu, mu_2) > eps`` at
    ``n = 0..horizon``, where ``mu_2 = (delta_{-1/2} + delta_{1/2}) / 2``.  An
    orbit that revisits a measure is periodic from then on, so the check covers
    every ``n`` for such samples.
    """
    eps0, eps = as_fraction(eps0), as_fraction(eps)
    if not 0 < eps0 < Fraction(1, 4):
        raise ValueError("eps0 must lie in (0, 1/4)")
    if not 0 < eps < Fraction(1, 2) - eps0:
        raise ValueError("eps must lie in (0, 1/2 - eps0)")
    system = build_zoo("fig1", q=grid)
    sp = system.space
    f = system.map_at(0)
    left, right = Fraction(-1, 2), Fraction(1, 2)
    mu2 = mix([(Fraction(1, 2), dirac(sp, left)), (Fraction(1, 2), dirac(sp, right))])
    K = sp.segment(0, 1)
    rng = random.Random(seed)
    samples, rejected = sample_ball(sp, left, eps0, q, sample_size, rng)
    periodic = 0
    worst = None
    for nu in samples:
        if mass(nu, K) > eps0:
            return PropertyVerdict("fails", {"nu": nu, "mass_on_K": mass(nu, K)},
                                   detail="a ball measure puts more than eps0 on [0, 1]")
        seen = set()
        cur = nu
        for n in range(horizon + 1):
            if cur in seen:
                periodic += 1
                break
            seen.add(cur)
            d = prohorov_fast(cur, mu2)
            if d <= eps:
                return PropertyVerdict("fails", {"nu": nu, "n": n, "distance": d},
                                       detail="an orbit point enters the eps-ball around mu_2")
            if worst is None or d < worst:
                worst = d
            cur = pushforward(f, cur)
    return PropertyVerdict("holds", {"closest_distance": worst, "seed": seed},
                           horizon=horizon,
                           detail=f"{len(samples)} samples ({rejected} rejected), "
                                  f"{periodic} orbits closed into a cycle within the horizon")


def verify_shift_convergence(N: int = 10, ms=None, tol=0.0, samples: int = 50, seed: int = 0,
                             measures=None) -> PropertyVerdict:
    """Pushforwards under the truncated shift reach ``delta_inf`` by time ``2N + 1``.

    Also checks that ``P(f^m mu, delta_inf)`` is non-increasing along the
    checkpoints from the first time all mass sits on nonnegative integers.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    system = build_zoo("zshift", N=N)
    sp = system.space
    f = system.map_at(0)
    target = dirac(sp, INF)
    ms = sorted(ms) if ms is not None else list(range(0, 2 * N + 6))
    rng = random.Random(seed)
    if measures is None:
        measures = []
        for _ in range(samples):
            k = rng.randint(1, 6)
            pts = rng.sample(sp.points, k)
            w = [rng.randint(1, 9) for _ in pts]
            measures.append(DiscreteMeasure.from_pairs(sp, [(p, Fraction(c, sum(w))) for p, c in zip(pts, w)]))
    else:
        if any(mu.space.kind != "zinf" or mu.space.params["N"] != N for mu in measures):
            raise ValueError(f"measures must live on the compactified integers with N={N}")
        measures = [DiscreteMeasure.from_pairs(sp, mu.items()) for mu in measures]
    absorb = 2 * N + 1
    for mu in measures:
        cur, m = mu, 0
        curve = {}
        monotone_from = None
        last = max(max(ms), absorb)
        while m <= last:
            if monotone_from is None and all(x == INF or x >= 0 for x in cur.support):
                monotone_from = m
            if m in ms or m == absorb:
                curve[m] = prohorov_fast(cur, target)
            if m == absorb and cur != target:
                return PropertyVerdict("fails", {"mu": mu, "m": m, "image": cur},
                                       detail="mass has not been absorbed at infinity")
            cur = pushforward(f, cur)
            m += 1
        late = [curve[m] for m in sorted(curve) if m >= absorb]
        if any(v > tol for v in late):
            return PropertyVerdict("fails", {"mu": mu, "curve": curve}, detail="distance above tol after absorption")
        mono = [curve[m] for m in sorted(curve) if monotone_from is not None and m >= monotone_from]
        for a, b in zip(mono, mono[1:]):
            if b > a:
                return PropertyVerdict("fails", {"mu": mu, "curve": curve, "from": monotone_from},
                                       detail="checkpoint distances increase")
    return PropertyVerdict("holds", {"absorbed_by": absorb, "measures": len(measures)},
                           detail="delta_inf is a fixed point, so the absorbed state persists for all later m")


def _arc(space, center, r) -> list:
    return [i for i, p in enumerate(space.points) if space.distance(p, center) < r]


def verify_arc_order_obstruction(q: int = 64, horizon: int = 60, eps0=Fraction(1, 12),
                                 eps1=Fraction(1, 12), anchors=(0, Fraction(1, 3), Fraction(2, 3)),
                                 min_den: int = 10**4) -> PropertyVerdict:
    """Bounded-horizon search for a time that defeats the three-arc obstruction.

    For the circle word system, the images of the arcs ``B(a_i, eps0)`` under
    ``f_0^n`` would all have to meet both ``B(a_1, eps1)`` and
    ``B(a_2, eps1)`` for the induced system to hit two Dirac balls from the
    uniform three-point measure at one time.  Grid snapping breaks exact
    invertibility, so this is approximate and never certifies the claim.
    """
    eps0, eps1 = as_fraction(eps0), as_fraction(eps1)
    system = build_zoo("circle_wm", q=q, min_den=min_den)
    sp = system.space
    anchors = [sp.snap(a) for a in anchors]
    arcs = [set(_arc(sp, a, eps0)) for a in anchors]
    targets = [set(_arc(sp, a, eps1)) for a in anchors[:2]]
    if any(t & u for t in targets for u in targets if t is not u):
        raise ValueError("target balls must be disjoint")
    images = [set(a) for a in arcs]
    for n in range(1, horizon + 1):
        tab = system.map_at(n - 1).table
        images = [{int(tab[i]) for i in im} for im in images]
        if all(im & t for im in images for t in targets):
            return PropertyVerdict("fails", {"n": n, "images": [sorted(sp.points[i] for i in im) for im in images]},
                                   horizon=horizon, detail="all three arc images meet both target balls")
    return PropertyVerdict("unknown", horizon=horizon,
                           detail="consistent: no time up to the horizon defeats the obstruction")
