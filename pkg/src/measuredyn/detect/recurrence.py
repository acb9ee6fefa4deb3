"""Hitting-time sets and the transitivity / mixing / weak-mixing deciders.

On a finite state set with an eventually periodic generator, the pair
``(phase(n), S_n)`` of the current map phase and the current image set takes
finitely many values, so every orbit of sets is eventually periodic and the
quantifiers over all ``n`` reduce to one transient plus one cycle.  Open sets
are represented by singletons: on a finite space each singleton is open and
every nonempty open set contains one.
"""

from __future__ import annotations

import itertools

from .models import FiniteModel, as_model
from .types import PropertyVerdict, TimeSet, jsonable

DEFAULT_HORIZON = 200
TUPLE_CAP = 200_000


def _indices(model: FiniteModel, S) -> frozenset:
    out = set()
    for s in S:
        if s not in model.index:
            raise ValueError(f"{s!r} is not a state of {model!r}")
        out.add(model.index[s])
    return frozenset(out)


def hitting_times(system, U, V, horizon: int, *, q: int | None = None, cells: bool = False) -> TimeSet:
    """``{1 <= n <= horizon : f_0^n(U) meets V}`` by forward propagation of ``U``."""
    model = as_model(system, q=q, cells=cells)
    if not U or not V:
        raise ValueError("U and V must be nonempty")
    S, Vi = _indices(model, U), _indices(model, V)
    members = []
    for n in range(1, horizon + 1):
        S = model.post(n - 1, S)
        if S & Vi:
            members.append(n)
    return TimeSet(horizon, tuple(members))


def set_orbit(model: FiniteModel, S0: frozenset, limit: int | None = None):
    """Sets ``S_1, S_2, ...`` until the ``(phase, set)`` key repeats.

    Returns ``(sets, start)`` where ``sets[n-1] = S_n`` and the tail
    ``sets[start-1:]`` repeats forever.  ``start`` is ``None`` when the
    generator is not eventually periodic and ``limit`` steps were taken.
    """
    seen: dict = {}
    sets = []
    S = S0
    n = 0
    while True:
        S = model.post(n, S)
        n += 1
        if model.eventually_periodic:
            key = (model.phase(n), S)
            if key in seen:
                return sets, seen[key]
            seen[key] = n
        sets.append(S)
        if limit is not None and n >= limit:
            return sets, None


def _undecidable(horizon: int, what: str) -> PropertyVerdict:
    return PropertyVerdict("unknown", horizon=horizon,
                           detail=f"generator is not eventually periodic; {what} checked up to the horizon only")


def decide_transitive(system, *, q: int | None = None, cells: bool = False,
                      horizon: int = DEFAULT_HORIZON) -> PropertyVerdict:
    """Every singleton pair ``(u, v)`` has some ``n >= 1`` with ``f_0^n(u)`` meeting ``v``."""
    model = as_model(system, q=q, cells=cells)
    periodic = model.eventually_periodic
    for u in range(len(model)):
        sets, _ = set_orbit(model, frozenset([u]), None if periodic else horizon)
        reach = frozenset().union(*sets)
        if len(reach) < len(model):
            v = min(set(range(len(model))) - reach)
            if not periodic:
                return _undecidable(horizon, "transitivity")
            return PropertyVerdict("fails", {"U": [model.states[u]], "V": [model.states[v]],
                                             "reachable": sorted(reach)},
                                   detail="closure of forward images of U never meets V")
    return PropertyVerdict("holds", detail="every pair hit" + ("" if periodic else " within the horizon"),
                           horizon=None if periodic else horizon)


def decide_mixing(system, *, q: int | None = None, cells: bool = False,
                  horizon: int = DEFAULT_HORIZON) -> PropertyVerdict:
    """Every singleton pair is hit at all sufficiently large times."""
    model = as_model(system, q=q, cells=cells)
    if not model.eventually_periodic:
        return _undecidable(horizon, "mixing")
    for u in range(len(model)):
        sets, start = set_orbit(model, frozenset([u]))
        cycle = sets[start - 1:]
        always = frozenset.intersection(*cycle)
        if len(always) < len(model):
            v = min(set(range(len(model))) - always)
            missing = [start + i for i, S in enumerate(cycle) if v not in S]
            return PropertyVerdict("fails", {"U": [model.states[u]], "V": [model.states[v]],
                                             "cycle_start": start, "cycle_length": len(cycle),
                                             "missed_times": missing},
                                   detail="N(U,V) misses a residue class of the eventual cycle")
    return PropertyVerdict("holds", detail="every pair is hit on the whole eventual cycle")


def time_patterns(model: FiniteModel, limit: int | None = None) -> list:
    """Distinct patterns ``P_n = {(u, v) : f_0^n(u) meets v}`` over all ``n >= 1``."""
    S = tuple(frozenset([u]) for u in range(len(model)))
    seen = set()
    patterns = set()
    n = 0
    while True:
        S = tuple(model.post(n, s) for s in S)
        n += 1
        if model.eventually_periodic:
            key = (model.phase(n), S)
            if key in seen:
                break
            seen.add(key)
        patterns.add(frozenset((u, v) for u, s in enumerate(S) for v in s))
        if limit is not None and n >= limit:
            break
    return sorted(patterns, key=lambda p: sorted(p))


def decide_weak_mixing_order(system, order: int, *, q: int | None = None, cells: bool = False,
                             horizon: int = DEFAULT_HORIZON, cap: int = TUPLE_CAP) -> PropertyVerdict:
    """Every ``order``-tuple of singleton pairs shares a common hitting time."""
    if order < 1:
        raise ValueError("order must be at least 1")
    model = as_model(system, q=q, cells=cells)
    periodic = model.eventually_periodic
    patterns = time_patterns(model, None if periodic else horizon)
    pairs = [(u, v) for u in range(len(model)) for v in range(len(model))]
    maximal = [p for p in patterns if not any(p < r for r in patterns)]
    count = 0
    for k in range(1, order + 1):
        for combo in itertools.combinations(pairs, k):
            count += 1
            if count > cap:
                return PropertyVerdict("unknown", horizon=horizon,
                                       detail=f"more than {cap} tuples; raise the cap")
            if not any(all(c in p for c in combo) for p in maximal):
                if not periodic:
                    return _undecidable(horizon, "weak mixing")
                witness = [{"U": [model.states[u]], "V": [model.states[v]]} for u, v in combo]
                return PropertyVerdict("fails", jsonable({"pairs": witness}),
                                       detail="no common time hits all pairs")
    return PropertyVerdict("holds", detail=f"{len(maximal)} maximal time patterns cover all tuples",
                           horizon=None if periodic else horizon)
