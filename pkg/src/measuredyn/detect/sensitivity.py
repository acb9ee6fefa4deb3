"""Finite-horizon sensitivity time sets and orbit-pair statistics."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..measure import prohorov_fast
from ..space import as_fraction
from ..systems import InducedSystem
from .types import PairStats, TimeSet


def _distance(system):
    if isinstance(system, InducedSystem):
        return prohorov_fast
    return system.space.distance


def _level(v):
    return v if isinstance(v, float) else as_fraction(v)


def _orbit(system, x, horizon: int) -> list:
    out = [x]
    for n in range(horizon):
        x = system.map_at(n)(x)
        out.append(x)
    return out


def ball_candidates(system, x, eps) -> list:
    """States of a base system strictly within ``eps`` of ``x``, other than ``x``."""
    if isinstance(system, InducedSystem):
        raise ValueError("measure balls are not enumerable; pass candidates explicitly")
    sp = system.space
    eps = _level(eps)
    return [y for y in sp.points if y != x and sp.distance(x, y) < eps]


def sensitivity_times(system, x, eps, delta, horizon: int, candidates: Sequence | None = None) -> TimeSet:
    """``{1 <= n <= horizon : some candidate y separates from x by more than delta at n}``.

    Candidates default to every other state in the open ``eps``-ball; for an
    induced system they must be supplied (they are filtered to the ball).
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    d = _distance(system)
    eps, delta = _level(eps), _level(delta)
    if candidates is None:
        candidates = ball_candidates(system, x, eps)
    cands = [y for y in candidates if d(x, y) < eps]
    if not cands:
        raise ValueError("ball empty at this resolution")
    ox = _orbit(system, x, horizon)
    hit = set()
    for y in cands:
        oy = _orbit(system, y, horizon)
        hit.update(n for n in range(1, horizon + 1) if d(ox[n], oy[n]) > delta)
    return TimeSet(horizon, tuple(sorted(hit)))


def pair_stats(system, x, y, horizon: int, thresholds: Sequence = ()) -> PairStats:
    """Distances ``d(f_0^i x, f_0^i y)`` for ``i = 1..horizon`` and their density curves.

    ``lower[t]``/``upper[t]`` are the min/max over ``n`` in the second half of
    the horizon of ``#{i <= n : d_i < t} / n``.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    d = _distance(system)
    ox, oy = _orbit(system, x, horizon), _orbit(system, y, horizon)
    dist = tuple(d(a, b) for a, b in zip(ox[1:], oy[1:]))
    start = horizon // 2
    tail = dist[start:]
    lower, upper = {}, {}
    for t in thresholds:
        t = _level(t)
        count = 0
        fr = []
        for n, v in enumerate(dist, 1):
            count += v < t
            if n > start:
                fr.append(Fraction(count, n))
        lower[t], upper[t] = min(fr), max(fr)
    return PairStats(horizon, dist, min(dist), max(dist), min(tail), max(tail), lower, upper)
