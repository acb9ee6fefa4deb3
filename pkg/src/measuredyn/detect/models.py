"""Finite state models that the exact deciders run on.

A model enumerates the states of a system (space points, cells of a grid, or
the weight-grid measures ``M_q``), gives the successor structure at each time
and an exact distance between states.
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from ..measure import compositions, from_counts, prohorov_fast
from ..space import as_fraction
from ..systems import InducedSystem, SystemDef, pl_image


class FiniteModel:
    """States ``0..S-1`` with successor function (or relation) per time step."""

    def __init__(self, states, system, step: Callable[[int], Any], distance: Callable,
                 *, relation: bool = False, kind: str = "points"):
        self.states = list(states)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.system = system
        self._step = step
        self._distance = distance
        self._step_cache: dict = {}
        self._dist_cache: dict = {}
        self.relation = relation
        self.kind = kind

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return f"FiniteModel({self.kind}, {len(self.states)} states, {self.system!r})"

    @property
    def eventually_periodic(self) -> bool:
        return self.system.eventually_periodic

    def phase(self, n: int) -> int:
        return self.system.phase(n) if self.eventually_periodic else n

    def step(self, n: int):
        key = self.phase(n)
        if key not in self._step_cache:
            self._step_cache[key] = self._step(n)
        return self._step_cache[key]

    def post(self, n: int, S) -> frozenset:
        """Image of a set of state indices under the time-``n`` map."""
        st = self.step(n)
        if self.relation:
            out = set()
            for i in S:
                out |= st[i]
            return frozenset(out)
        return frozenset(int(st[i]) for i in S)

    def image(self, n: int, i: int) -> int:
        """Successor of state ``i`` (function models only)."""
        return int(self.step(n)[i])

    def dist(self, i: int, j: int):
        if i == j:
            return 0
        key = (i, j) if i < j else (j, i)
        if key not in self._dist_cache:
            self._dist_cache[key] = self._distance(self.states[key[0]], self.states[key[1]])
        return self._dist_cache[key]

    def ball(self, i: int, r) -> list:
        """Indices ``j`` with ``dist(i, j) < r``."""
        return [j for j in range(len(self.states)) if self.dist(i, j) < r]


def point_model(system: SystemDef) -> FiniteModel:
    sp = system.space
    return FiniteModel(sp.points, system, lambda n: system.map_at(n).table, sp.distance)


def measure_model(system, q: int) -> FiniteModel:
    """Induced dynamics on the weight grid ``M_q`` (closed under pushforward)."""
    base = system.base if isinstance(system, InducedSystem) else system
    sp = base.space
    S = len(sp)
    counts = list(compositions(q, S))
    cindex = {c: i for i, c in enumerate(counts)}
    arr = np.array(counts, dtype=np.int64)
    states = [from_counts(sp, c) for c in counts]

    def step(n):
        tab = base.map_at(n).table
        out = np.zeros_like(arr)
        for src in range(S):
            out[:, tab[src]] += arr[:, src]
        return np.array([cindex[tuple(r)] for r in out.tolist()], dtype=np.int64)

    model = FiniteModel(states, InducedSystem(base), step, prohorov_fast, kind=f"measures(q={q})")
    model.counts = counts
    return model


def cell_model(system: SystemDef) -> FiniteModel:
    """Closed grid cells of an interval system under a piecewise-linear map.

    Cell ``j`` succeeds cell ``i`` when the exact image of ``i`` meets the
    interior of ``j``.  When every map sends grid points to grid points (a
    Markov grid) the set dynamics of cells is exact; otherwise it
    over-approximates, and :func:`markov_exact` reports which case applies.
    """
    sp = system.space
    if sp.kind != "interval":
        raise ValueError("cell models need an interval grid")
    pts = sp.points
    cells = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    markov = [True]

    def step(n):
        f = system.map_at(n)
        if f.kind != "piecewise-linear":
            raise ValueError("cell models need piecewise-linear maps")
        nodes = f.params["nodes"]
        rel = []
        for lo, hi in cells:
            a, b = pl_image(nodes, lo, hi)
            for v in (a, b):
                if v not in sp.index_of:
                    markov[0] = False
            hit = set()
            for j, (c, d) in enumerate(cells):
                if (a < d and b > c) if a < b else (c < a < d):
                    hit.add(j)
            rel.append(frozenset(hit))
        return rel

    model = FiniteModel(cells, system, step, lambda u, v: abs(as_fraction(u[0]) - as_fraction(v[0])),
                        relation=True, kind="cells")
    model._markov = markov
    return model


def markov_exact(model: FiniteModel) -> bool:
    """True when every step built so far mapped grid points onto grid points."""
    return getattr(model, "_markov", [True])[0]


def as_model(system, *, q: int | None = None, cells: bool = False) -> FiniteModel:
    if isinstance(system, FiniteModel):
        return system
    if isinstance(system, InducedSystem):
        if q is None:
            raise ValueError("an induced system needs a weight-grid denominator q")
        return measure_model(system, q)
    if cells:
        return cell_model(system)
    return point_model(system)
