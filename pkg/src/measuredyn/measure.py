"""Finitely supported probability measures and the Prohorov distance.

Two independent routes compute the distance:

* :func:`prohorov_bruteforce` enumerates every subset ``A`` of ``supp(mu)``
  and solves the one-sided condition ``mu(A) <= nu(A^eps) + eps`` exactly.
* :func:`prohorov_fast` fixes ``eps`` at a breakpoint, finds the worst subset
  with a maximum-weight-closure min cut and bisects over breakpoints.

Both work on exact rationals when weights and distances are rational.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .space import FLOAT_TOL, INF, MetricSpace, SpaceError, as_fraction

ENUMERATION_CAP = 16
SMALL_SIDE = 6


class MeasureError(ValueError):
    pass


def _is_exact(w) -> bool:
    return isinstance(w, (Fraction, int)) and not isinstance(w, bool)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Probability measure with finite support on a :class:`MetricSpace`.

    Build through :meth:`from_pairs` (or the module helpers) so that the
    support is canonical: distinct points in space order, positive weights.
    """

    space: MetricSpace
    support: tuple
    weights: tuple

    @classmethod
    def from_pairs(cls, space: MetricSpace, pairs: Iterable) -> "DiscreteMeasure":
        acc = defaultdict(Fraction)
        exact = True
        for x, w in pairs:
            space.index(x)
            if not _is_exact(w):
                exact = False
            if w < 0:
                raise MeasureError(f"negative weight {w!r} at {x!r}")
            acc[x] = acc[x] + w
        items = sorted(((x, w) for x, w in acc.items() if w != 0), key=lambda t: space.index(t[0]))
        if not items:
            raise MeasureError("measure has empty support")
        total = sum(w for _, w in items)
        if exact:
            if total != 1:
                raise MeasureError(f"weights sum to {total}, not 1")
            items = [(x, Fraction(w)) for x, w in items]
        elif abs(total - 1) > FLOAT_TOL:
            raise MeasureError(f"weights sum to {total!r}, not 1")
        return cls(space, tuple(x for x, _ in items), tuple(w for _, w in items))

    @property
    def exact(self) -> bool:
        return all(isinstance(w, Fraction) for w in self.weights)

    def items(self):
        return zip(self.support, self.weights)

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.weights))

    def __getitem__(self, x):
        return self.as_dict().get(x, 0)

    def __len__(self) -> int:
        return len(self.support)

    def _key(self):
        return (id(self.space), self.support, self.weights)

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return self.space is other.space and self.support == other.support and self.weights == other.weights

    def __hash__(self):
        return hash((self.support, self.weights))

    def __repr__(self):
        body = ", ".join(f"{x}: {w}" for x, w in self.items())
        return f"DiscreteMeasure({{{body}}})"

    @property
    def is_dirac(self) -> bool:
        return len(self.support) == 1


def dirac(space: MetricSpace, x) -> DiscreteMeasure:
    return DiscreteMeasure.from_pairs(space, [(x, Fraction(1))])


def empirical(space: MetricSpace, points: Sequence) -> DiscreteMeasure:
    """Uniform average of Dirac masses; repeated points accumulate weight."""
    points = list(points)
    if not points:
        raise MeasureError("empirical measure of an empty list")
    n = len(points)
    return DiscreteMeasure.from_pairs(space, [(p, Fraction(1, n)) for p in points])


def mix(terms: Sequence[tuple]) -> DiscreteMeasure:
    """Convex combination ``sum c_i mu_i``; coefficients must sum to 1."""
    terms = list(terms)
    if not terms:
        raise MeasureError("mix of no measures")
    space = terms[0][1].space
    total = 0
    pairs = []
    for c, m in terms:
        if m.space is not space:
            raise MeasureError("mixing measures on different spaces")
        if c < 0:
            raise MeasureError(f"negative coefficient {c!r}")
        total += c
        pairs.extend((x, c * w) for x, w in m.items())
    exact = all(_is_exact(c) for c, _ in terms)
    if (exact and total != 1) or (not exact and abs(total - 1) > FLOAT_TOL):
        raise MeasureError(f"coefficients sum to {total}, not 1")
    return DiscreteMeasure.from_pairs(space, pairs)


def mass(mu: DiscreteMeasure, A: Iterable):
    A = set(A)
    return sum((w for x, w in mu.items() if x in A), Fraction(0))


def pushforward(f: Callable, mu: DiscreteMeasure) -> DiscreteMeasure:
    """Image measure ``mu o f^{-1}``: each atom moves to ``f(x)``."""
    pairs = []
    for x, w in mu.items():
        y = f(x)
        if y not in mu.space:
            raise MeasureError(f"image {y!r} of {x!r} leaves the space")
        pairs.append((y, w))
    return DiscreteMeasure.from_pairs(mu.space, pairs)


def from_counts(space: MetricSpace, counts: Sequence[int]) -> DiscreteMeasure:
    """Measure with weight ``counts[i] / sum(counts)`` on ``space.points[i]``."""
    q = sum(counts)
    return DiscreteMeasure.from_pairs(
        space, [(p, Fraction(c, q)) for p, c in zip(space.points, counts) if c])


def counts_of(mu: DiscreteMeasure, q: int) -> tuple:
    """Inverse of :func:`from_counts` for measures in the weight grid ``M_q``."""
    out = [0] * len(mu.space)
    for x, w in mu.items():
        c = w * q
        if c.denominator != 1:
            raise MeasureError(f"weight {w} is not a multiple of 1/{q}")
        out[mu.space.index(x)] = int(c)
    return tuple(out)


def compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total`` (lex order)."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def measure_grid(space: MetricSpace, q: int, support: Sequence | None = None) -> list:
    """Every measure with weights in ``{0, 1/q, ..., 1}`` (optionally on a sub-support)."""
    if q <= 0:
        raise MeasureError("weight denominator q must be positive")
    pts = list(space.points if support is None else support)
    out = []
    for c in compositions(q, len(pts)):
        out.append(DiscreteMeasure.from_pairs(space, [(p, Fraction(k, q)) for p, k in zip(pts, c) if k]))
    return out


def quantize(mu: DiscreteMeasure, q: int) -> DiscreteMeasure:
    """Largest-remainder rounding of ``mu`` onto the weight grid ``M_q``."""
    raw = [(x, Fraction(w) * q) for x, w in mu.items()]
    floors = [(x, math.floor(r), r - math.floor(r)) for x, r in raw]
    short = q - sum(f for _, f, _ in floors)
    order = sorted(range(len(floors)), key=lambda i: (-floors[i][2], i))
    counts = {x: f for x, f, _ in floors}
    for i in order[:short]:
        counts[floors[i][0]] += 1
    return DiscreteMeasure.from_pairs(mu.space, [(x, Fraction(c, q)) for x, c in counts.items() if c])


# Prohorov distance -----------------------------------------------------


def _check_pair(mu: DiscreteMeasure, nu: DiscreteMeasure):
    if mu.space is not nu.space:
        raise MeasureError("measures live on different spaces")


def _min_of_max(breaks: Sequence, violation: Callable[[int], object]):
    """``min_k max(breaks[k], violation(k))`` for nonincreasing ``violation``.

    ``breaks`` is strictly increasing with ``breaks[0] == 0``.  On the
    interval ``(breaks[k], breaks[k+1]]`` the fattened mass is constant, so the
    infimum of feasible ``eps`` there is ``max(breaks[k], violation(k))``.
    Bisection finds the first ``k`` with ``violation(k) <= breaks[k]``.
    """
    lo, hi = 0, len(breaks) - 1
    cache = {}

    def V(k):
        if k not in cache:
            cache[k] = violation(k)
        return cache[k]

    while lo < hi:
        mid = (lo + hi) // 2
        if V(mid) <= breaks[mid]:
            hi = mid
        else:
            lo = mid + 1
    best = breaks[lo] if V(lo) <= breaks[lo] else V(lo)
    if lo > 0:
        best = min(best, V(lo - 1))
    return best


def _one_sided_dirac(z, other: DiscreteMeasure):
    """Closed form when one side is ``delta_z``: the only bad set is far from z."""
    space = other.space
    dists = [(space.distance(z, y), w) for y, w in other.items()]
    breaks = sorted({space.zero()} | {d for d, _ in dists})
    total = sum(w for _, w in dists)

    def violation(k):
        t = breaks[k]
        return total - sum((w for d, w in dists if d <= t), 0 * total)

    return _min_of_max(breaks, violation)


def prohorov_bruteforce(mu: DiscreteMeasure, nu: DiscreteMeasure, cap: int = ENUMERATION_CAP):
    """Exact one-sided Prohorov distance by enumerating subsets of ``supp(mu)``."""
    _check_pair(mu, nu)
    m = len(mu.support)
    if m > cap:
        raise MeasureError(f"support of size {m} exceeds the enumeration cap {cap}; use prohorov_fast")
    space = mu.space
    D = [[space.distance(x, y) for y in nu.support] for x in mu.support]
    zero = space.zero()
    best = zero
    for r in range(1, m + 1):
        for A in itertools.combinations(range(m), r):
            mA = sum(mu.weights[i] for i in A)
            dA = [min(D[i][j] for i in A) for j in range(len(nu.support))]
            breaks = sorted({zero} | set(dA))
            eps_A = None
            for t in breaks:
                g = sum((nu.weights[j] for j in range(len(dA)) if dA[j] <= t), 0 * mA)
                cand = max(t, mA - g)
                if eps_A is None or cand < eps_A:
                    eps_A = cand
            if eps_A > best:
                best = eps_A
    return best


def _closure_violation(mu: DiscreteMeasure, nu: DiscreteMeasure, D, t):
    """``max_A mu(A) - nu({y : d(y, A) <= t})`` via min cut (max-weight closure).

    Both sides give the same value (it is ``1 - maxflow``), so when one
    support is small the subsets of that side are enumerated instead.
    """
    small = min(len(mu.support), len(nu.support))
    if small <= SMALL_SIDE:
        if len(mu.support) == small:
            rows, w_small, w_big = D, mu.weights, nu.weights
        else:
            rows = [list(col) for col in zip(*D)]
            w_small, w_big = nu.weights, mu.weights
        close = [[j for j, d in enumerate(r) if d <= t] for r in rows]
        best = 0 * w_small[0]
        for r in range(1, small + 1):
            for A in itertools.combinations(range(small), r):
                hit = set()
                for i in A:
                    hit.update(close[i])
                gap = sum(w_small[i] for i in A) - sum((w_big[j] for j in hit), 0 * best)
                if gap > best:
                    best = gap
        return best
    G = nx.DiGraph()
    G.add_node("s")
    G.add_node("t")
    for i, w in enumerate(mu.weights):
        G.add_edge("s", ("x", i), capacity=w)
    for j, w in enumerate(nu.weights):
        G.add_edge(("y", j), "t", capacity=w)
    for i, row in enumerate(D):
        for j, d in enumerate(row):
            if d <= t:
                G.add_edge(("x", i), ("y", j))  # no capacity attribute = infinite
    flow = nx.maximum_flow_value(G, "s", "t", flow_func=edmonds_karp)
    return sum(mu.weights, 0 * mu.weights[0]) - flow


def prohorov_fast(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Exact Prohorov distance via min cut over the finite breakpoint set."""
    _check_pair(mu, nu)
    space = mu.space
    if mu == nu:
        return space.zero()
    if mu.is_dirac:
        return _one_sided_dirac(mu.support[0], nu)
    if nu.is_dirac:
        return _one_sided_dirac(nu.support[0], mu)
    D = [[space.distance(x, y) for y in nu.support] for x in mu.support]
    breaks = sorted({space.zero()} | {d for row in D for d in row})
    return _min_of_max(breaks, lambda k: _closure_violation(mu, nu, D, breaks[k]))


prohorov = prohorov_fast


def worst_set(mu: DiscreteMeasure, nu: DiscreteMeasure, eps) -> tuple:
    """A subset ``A`` of ``supp(mu)`` maximizing ``mu(A) - nu(A^eps)`` and that gap.

    Used to build re-checkable witnesses; brute force within the enumeration cap.
    """
    _check_pair(mu, nu)
    space = mu.space
    best, best_A = None, ()
    for r in range(0, len(mu.support) + 1):
        for A in itertools.combinations(mu.support, r):
            gap = mass(mu, A) - sum((w for y, w in nu.items()
                                     if A and min(space.distance(a, y) for a in A) < eps), Fraction(0))
            if best is None or gap > best:
                best, best_A = gap, A
    return best_A, best


# serialization ---------------------------------------------------------


def point_id(x) -> str | int | list:
    if x == INF and not isinstance(x, tuple):
        return "inf"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, tuple):
        return [point_id(v) for v in x]
    return x


def to_record(mu: DiscreteMeasure) -> list:
    """``[[point-id, numerator, denominator], ...]`` (floats keep a plain value)."""
    out = []
    for x, w in mu.items():
        if isinstance(w, Fraction):
            out.append([point_id(x), w.numerator, w.denominator])
        else:
            out.append([point_id(x), float(w)])
    return out


def from_record(space: MetricSpace, record) -> DiscreteMeasure:
    """Parse ``[[pid, num, den], ...]`` or ``[[pid, weight], ...]`` or a ``{pid: weight}`` map."""
    if isinstance(record, dict):
        record = [[k, v] for k, v in record.items()]
    pairs = []
    for entry in record:
        pid = space.point(entry[0])
        if len(entry) == 3:
            w = Fraction(int(entry[1]), int(entry[2]))
        else:
            raw = entry[1]
            w = raw if isinstance(raw, float) else as_fraction(raw)
        pairs.append((pid, w))
    try:
        return DiscreteMeasure.from_pairs(space, pairs)
    except SpaceError as exc:
        raise MeasureError(str(exc)) from exc
