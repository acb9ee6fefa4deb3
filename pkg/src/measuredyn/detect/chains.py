"""Pseudo-orbits: chain search, constructive measure chains and shadowing."""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction

from ..measure import DiscreteMeasure, dirac, mix, prohorov_fast
from ..space import as_fraction, two_point
from ..systems import InducedSystem, SystemDef, induced, preimage_witness
from .models import FiniteModel, as_model
from .types import Chain, PropertyVerdict

SHADOWING_NODE_CAP = 2_000_000


def _threshold(x):
    return as_fraction(x)


class _Balls:
    """Cached ``{v : d(s, v) < r}`` for a fixed radius."""

    def __init__(self, model: FiniteModel, r):
        self.model, self.r, self.cache = model, r, {}

    def __call__(self, i: int) -> list:
        if i not in self.cache:
            self.cache[i] = self.model.ball(i, self.r)
        return self.cache[i]


def _chain_from(model: FiniteModel, idx: list, delta) -> Chain:
    slacks = tuple(model.dist(model.image(n, a), b) for n, (a, b) in enumerate(zip(idx, idx[1:])))
    return Chain(tuple(model.states[i] for i in idx), delta, slacks)


def find_chain(system, x, y, delta, max_len: int | None = None, *, q: int | None = None):
    """Shortest ``delta``-chain of length ``>= 1`` from ``x`` to ``y`` or ``None``.

    Layered breadth-first search over ``(phase, state)``; among shortest
    chains the one with the least state indices (lexicographically) is
    returned.  With ``max_len=None`` the search runs to the reachability
    closure, so ``None`` is a certificate of absence (eventually periodic
    generators only).
    """
    model = as_model(system, q=q)
    delta = _threshold(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if max_len is None and not model.eventually_periodic:
        raise ValueError("an unbounded search needs an eventually periodic generator")
    xi, yi = model.index[x], model.index[y]
    balls = _Balls(model, delta)
    layer = {xi: None}
    parents = []
    seen = set()
    n = 0
    while layer and (max_len is None or n < max_len):
        nxt: dict = {}
        for u in sorted(layer):
            for v in balls(model.image(n, u)):
                if v not in nxt:
                    nxt[v] = u
        n += 1
        parents.append(nxt)
        if yi in nxt:
            path = [yi]
            for k in range(n - 1, -1, -1):
                path.append(parents[k][path[-1]])
            return _chain_from(model, path[::-1], delta)
        if model.eventually_periodic:
            key = model.phase(n)
            nxt = {v: u for v, u in nxt.items() if (key, v) not in seen}
            seen.update((key, v) for v in nxt)
        layer = nxt
    return None


def chain_closure(system, x, delta, *, q: int | None = None) -> frozenset:
    """States reachable from ``x`` by ``delta``-chains of length ``>= 1`` (exact)."""
    model = as_model(system, q=q)
    if not model.eventually_periodic:
        raise ValueError("the closure needs an eventually periodic generator")
    delta = _threshold(delta)
    balls = _Balls(model, delta)
    start = (model.phase(0), model.index[x])
    seen = set()
    todo = deque([start])
    reach = set()
    while todo:
        ph, u = todo.popleft()
        for v in balls(model.image(ph, u)):
            reach.add(v)
            key = (model.phase(ph + 1), v)
            if key not in seen:
                seen.add(key)
                todo.append(key)
    return frozenset(model.states[i] for i in reach)


def decide_chain_transitive(system, delta, *, q: int | None = None) -> PropertyVerdict:
    """Every ordered pair of states is joined by a ``delta``-chain."""
    model = as_model(system, q=q)
    for x in model.states:
        reach = chain_closure(model, x, delta)
        if len(reach) < len(model):
            y = next(s for s in model.states if s not in reach)
            return PropertyVerdict("fails", {"x": x, "y": y, "delta": delta},
                                   detail="reachability closure from x misses y")
    return PropertyVerdict("holds", detail="every closure is the whole state set")


# constructive chains between measures ---------------------------------


def interpolation_steps(eps) -> int:
    """Least ``N`` with ``N * eps / 2 >= 1``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.ceil(2 / eps)


def pull_back(system: SystemDef, nu: DiscreteMeasure, k: int) -> DiscreteMeasure:
    """A measure ``nu*`` with ``f_0^k`` pushing it onto ``nu`` (atomwise preimages)."""
    pairs = []
    for y, w in nu.items():
        z = y
        for j in range(k - 1, -1, -1):
            z = preimage_witness(system.map_at(j), z)
        pairs.append((z, w))
    return DiscreteMeasure.from_pairs(nu.space, pairs)


def constructive_measure_chain(system, mu: DiscreteMeasure, nu: DiscreteMeasure, eps, k: int) -> Chain:
    """Explicit ``eps``-chain of length ``k`` from ``mu`` to ``nu`` in the induced system.

    The first ``N`` states slide mass from the orbit of ``mu`` to the orbit
    of a pulled-back ``nu*`` in steps of ``eps/2``; after that the chain
    follows the true orbit of ``nu*`` and lands on ``nu`` at time ``k``.
    """
    base = system.base if isinstance(system, InducedSystem) else system
    eps = as_fraction(eps)
    N = interpolation_steps(eps)
    if k < N:
        raise ValueError(f"length {k} is too short; the minimal length for eps={eps} is {N}")
    star = pull_back(base, nu, k)
    F = induced(base)
    a, b = mu, star
    states = []
    for n in range(k + 1):
        if n < N:
            t = n * eps / 2
            states.append(mix([(1 - t, a), (t, b)]) if t else a)
        else:
            states.append(b)
        if n < k:
            f = F.map_at(n)
            a, b = f(a), f(b)
    slacks = tuple(prohorov_fast(F.map_at(n)(s), t) for n, (s, t) in enumerate(zip(states, states[1:])))
    return Chain(tuple(states), eps, slacks)


# shadowing -------------------------------------------------------------


def decide_shadowing(system, delta, eps, *, q: int | None = None,
                     cap: int = SHADOWING_NODE_CAP) -> PropertyVerdict:
    """Exact shadowing check for one ``(delta, eps)`` pair on a finite model.

    Configurations are ``(phase, x_k, T_k)`` where ``T_k`` holds the current
    positions of every orbit that has stayed strictly within ``eps`` of the
    pseudo-orbit prefix.  An empty ``T_k`` is a bad prefix; since every state
    has a ``delta``-successor (its own image) the prefix extends to an infinite
    pseudo-orbit that no orbit shadows.  If no empty ``T_k`` is reachable, the
    nested nonempty candidate sets of any pseudo-orbit have a common point.
    """
    model = as_model(system, q=q)
    if not model.eventually_periodic:
        return PropertyVerdict("unknown", detail="generator is not eventually periodic")
    delta, eps = _threshold(delta), _threshold(eps)
    dballs, eballs = _Balls(model, delta), _Balls(model, eps)
    parent = {}
    todo = deque()
    for x0 in range(len(model)):
        node = (model.phase(0), x0, frozenset(eballs(x0)))
        parent[node] = None
        todo.append((0, node))
    while todo:
        n, node = todo.popleft()
        ph, x, T = node
        moved = frozenset(model.image(n, z) for z in T)
        for y in dballs(model.image(n, x)):
            T2 = moved & frozenset(eballs(y))
            nxt = (model.phase(n + 1), y, T2)
            if nxt in parent:
                continue
            parent[nxt] = node
            if not T2:
                prefix = [y]
                cur = node
                while cur is not None:
                    prefix.append(cur[1])
                    cur = parent[cur]
                states = [model.states[i] for i in reversed(prefix)]
                return PropertyVerdict("fails", {"pseudo_orbit": states, "delta": delta, "eps": eps},
                                       detail=f"no orbit stays within eps of this {len(states) - 1}-step prefix")
            if len(parent) > cap:
                return PropertyVerdict("unknown", detail=f"node cap {cap} reached", horizon=n + 1)
            todo.append((n + 1, nxt))
    return PropertyVerdict("holds", detail=f"{len(parent)} reachable configurations, none bad")


def unshadowed(system, prefix, delta, eps, *, q: int | None = None) -> bool:
    """Recheck a shadowing witness: a ``delta``-pseudo-orbit no state ``eps``-shadows."""
    model = as_model(system, q=q)
    delta, eps = _threshold(delta), _threshold(eps)
    idx = [model.index[s] for s in prefix]
    if any(model.dist(model.image(n, a), b) >= delta for n, (a, b) in enumerate(zip(idx, idx[1:]))):
        return False
    for z in range(len(model)):
        ok = True
        for n, x in enumerate(idx):
            if model.dist(z, x) >= eps:
                ok = False
                break
            if n + 1 < len(idx):
                z = model.image(n, z)
        if ok:
            return False
    return True


# the two-point pseudo-orbit that no measure shadows --------------------


def two_point_pseudo_orbit(delta, length: int | None = None) -> Chain:
    """Pseudo-orbit of the induced swap that drifts from ``delta_a`` to the midpoint.

    ``nu_n = (1 - n delta/2) delta_a + (n delta/2) delta_b`` for even ``n``,
    with ``a`` and ``b`` exchanged for odd ``n``, until ``n0 = floor(1/delta)``;
    after that it sits at ``(delta_a + delta_b)/2``.
    """
    delta = as_fraction(delta)
    if not 0 < delta < Fraction(1, 2):
        raise ValueError("delta must lie in (0, 1/2)")
    n0 = math.floor(1 / delta)
    N0 = settle_time(delta)
    length = N0 if length is None else length
    sp = two_point()
    da, db = dirac(sp, "a"), dirac(sp, "b")
    half = Fraction(1, 2)
    states = []
    for n in range(length + 1):
        t = n * delta / 2 if n <= n0 else half
        first, second = (da, db) if n % 2 == 0 else (db, da)
        states.append(mix([(1 - t, first), (t, second)]) if t else first)
    slacks = tuple(prohorov_fast(_swap(s), t) for s, t in zip(states, states[1:]))
    return Chain(tuple(states), delta, slacks)


def settle_time(delta) -> int:
    """Smallest even integer beyond ``floor(1/delta)``."""
    n0 = math.floor(1 / as_fraction(delta))
    return n0 + 1 if n0 % 2 else n0 + 2


def _swap(mu: DiscreteMeasure) -> DiscreteMeasure:
    other = {"a": "b", "b": "a"}
    return DiscreteMeasure.from_pairs(mu.space, [(other[x], w) for x, w in mu.items()])


def verify_two_point_nonshadowing(delta, grid: int = 1000) -> PropertyVerdict:
    """Check the pseudo-orbit and that no measure ``a delta_a + (1-a) delta_b`` shadows it.

    For each weight ``alpha`` on the grid, the worse of ``P(mu, nu_0)`` and
    ``P(f^{N0} mu, nu_{N0})`` is computed with the Prohorov solver and compared
    with ``1/4`` (and with the closed form ``max(1-alpha, |alpha-1/2|)``).
    """
    chain = two_point_pseudo_orbit(delta)
    delta = chain.delta
    if not all(h <= delta / 2 for h in chain.hop_slacks):
        worst = max(chain.hop_slacks)
        return PropertyVerdict("fails", {"hop": worst}, detail="a hop exceeds delta/2")
    N0 = chain.length
    nu0, nuN = chain.states[0], chain.states[N0]
    sp = nu0.space
    quarter = Fraction(1, 4)
    best = None
    for i in range(grid + 1):
        alpha = Fraction(i, grid)
        mu = DiscreteMeasure.from_pairs(sp, [("a", alpha), ("b", 1 - alpha)])
        muN = mu if N0 % 2 == 0 else _swap(mu)
        worst = max(prohorov_fast(mu, nu0), prohorov_fast(muN, nuN))
        if worst != max(1 - alpha, abs(alpha - Fraction(1, 2))):
            return PropertyVerdict("fails", {"alpha": alpha, "distance": worst},
                                   detail="solver disagrees with the closed form")
        if worst < quarter:
            return PropertyVerdict("fails", {"alpha": alpha, "distance": worst},
                                   detail="this measure shadows within 1/4")
        if best is None or worst < best[1]:
            best = (alpha, worst)
    return PropertyVerdict("holds", {"closest_alpha": best[0], "distance": best[1], "settle_time": N0},
                           detail=f"every alpha misses by at least {best[1]}; closed-form minimum 1/4 at alpha=3/4")
