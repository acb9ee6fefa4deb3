"""Finite compact metric spaces and the open fattening ``A^eps``.

Every space used by the package is realized by a finite, canonically ordered
point enumeration.  Interval and circle spaces are uniform grids whose points
are exact :class:`~fractions.Fraction` coordinates, so distances between them
are exact rationals.  The one-point compactification of the integers uses an
arctangent embedding on the circle and therefore produces float distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

INF = math.inf
"""The point at infinity of the compactified integers."""

FLOAT_TOL = 1e-12

KINDS = ("finite", "interval", "circle", "zinf", "product")


class SpaceError(ValueError):
    pass


def as_fraction(value: Any) -> Fraction:
    """Parse ints, Fractions, ``"p/q"`` strings and ``{"num", "den"}`` records exactly.

    Floats are converted through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SpaceError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SpaceError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, dict) and "num" in value:
        return Fraction(int(value["num"]), int(value.get("den", 1)))
    raise SpaceError(f"not a number: {value!r}")


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A finite metric space with a canonical point order.

    ``points`` are hashable identifiers (labels, grid coordinates, integers or
    :data:`INF`).  ``distance`` is exact whenever ``exact`` is true.
    """

    kind: str
    points: tuple
    params: dict = field(default_factory=dict)
    _dist: Callable[[Any, Any], Any] = field(default=None, repr=False)
    _vdist: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(default=None, repr=False)
    exact: bool = True

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise SpaceError("duplicate points in enumeration")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x) -> bool:
        return x in self.index_of

    def __repr__(self) -> str:
        return f"MetricSpace(kind={self.kind!r}, n={len(self.points)}, params={self.params!r})"

    @cached_property
    def index_of(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def index(self, x) -> int:
        try:
            return self.index_of[x]
        except KeyError:
            raise SpaceError(f"{x!r} is not a point of {self!r}") from None

    def distance(self, x, y):
        return self._dist(x, y)

    def dist_idx(self, i, j) -> np.ndarray:
        """Vectorized float distances between point indices (broadcasting)."""
        return self._vdist(np.asarray(i), np.asarray(j))

    @cached_property
    def diameter(self):
        if self.kind == "interval":
            return self.points[-1] - self.points[0]
        if self.kind == "finite" or len(self.points) <= 2048:
            return max(self.distance(x, y) for x in self.points for y in self.points)
        idx = np.arange(len(self.points))
        return float(max(self.dist_idx(i, idx).max() for i in idx))

    def distance_matrix(self) -> np.ndarray:
        idx = np.arange(len(self.points))
        return self.dist_idx(idx[:, None], idx[None, :])

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    # grid helpers ---------------------------------------------------------

    def snap(self, value) -> Any:
        """Nearest grid point to ``value``; ties go to the smaller coordinate."""
        if self.kind == "interval":
            lo, hi, q = self.params["lo"], self.params["hi"], self.params["q"]
            v = as_fraction(value) if not isinstance(value, float) else value
            t = (v - lo) * q / (hi - lo)
            k = math.ceil(t - Fraction(1, 2)) if not isinstance(t, float) else math.ceil(t - 0.5)
            if k < 0 or k > q:
                raise SpaceError(f"{value!r} lies outside [{lo}, {hi}]")
            return self.points[k]
        if self.kind == "circle":
            q = self.params["q"]
            v = as_fraction(value) if not isinstance(value, float) else value
            t = (v % 1) * q
            k = math.ceil(t - Fraction(1, 2)) if not isinstance(t, float) else math.ceil(t - 0.5)
            return self.points[k % q]
        if value in self.index_of:
            return value
        raise SpaceError(f"cannot snap {value!r} in a {self.kind} space")

    def point(self, value):
        """Canonical point for user input, requiring exact grid membership."""
        if isinstance(value, dict):
            value = as_fraction(value)
        elif isinstance(value, list):
            value = tuple(value)
        if value in self.index_of:
            return value
        if self.kind in ("interval", "circle"):
            p = self.snap(value)
            if self.kind == "circle":
                ok = as_fraction(value) % 1 == p
            else:
                ok = as_fraction(value) == p
            if ok:
                return p
            raise SpaceError(f"{value!r} is not a grid point (nearest is {p})")
        if self.kind == "zinf" and value in ("inf", "∞", "oo"):
            return INF
        if self.kind == "zinf" and isinstance(value, str):
            return self.point(int(value))
        if self.kind == "product" and isinstance(value, (list, tuple)):
            t = tuple(f.point(v) for f, v in zip(self.params["factors"], value))
            return self.point(t)
        raise SpaceError(f"{value!r} is not a point of {self!r}")

    def nearest(self, value):
        """Grid point nearest to ``value`` (alias of :meth:`snap` for grids)."""
        return self.snap(value)

    def segment(self, lo, hi, *, open_lo=False, open_hi=False) -> list:
        """Grid points with coordinate in the given (half-)open/closed range."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        out = []
        for p in self.points:
            if (p > lo or (p == lo and not open_lo)) and (p < hi or (p == hi and not open_hi)):
                out.append(p)
        return out


def fatten(space: MetricSpace, A: Iterable, eps) -> frozenset:
    """``{x : d(x, A) < eps}`` with strict inequality."""
    A = list(A)
    if not A:
        raise SpaceError("empty set has no fattening")
    if eps <= 0:
        raise SpaceError("eps must be positive")
    for a in A:
        space.index(a)
    return frozenset(x for x in space.points if min(space.distance(x, a) for a in A) < eps)


# builders --------------------------------------------------------------


def _finite(points: Sequence[Hashable], distances) -> MetricSpace:
    pts = tuple(points)
    n = len(pts)
    if n == 0:
        raise SpaceError("finite space needs at least one point")
    if distances is None or distances == "discrete":
        mat = [[Fraction(int(i != j)) for j in range(n)] for i in range(n)]
    else:
        mat = [[as_fraction(v) for v in row] for row in distances]
        if len(mat) != n or any(len(r) != n for r in mat):
            raise SpaceError("distance matrix shape does not match the point list")
    for i in range(n):
        if mat[i][i] != 0:
            raise SpaceError("distance(x, x) must be 0")
        for j in range(n):
            if mat[i][j] != mat[j][i]:
                raise SpaceError("distance matrix must be symmetric")
            if i != j and mat[i][j] <= 0:
                raise SpaceError("distinct points must have positive distance")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if mat[i][k] > mat[i][j] + mat[j][k]:
                    raise SpaceError("triangle inequality violated")
    index = {p: i for i, p in enumerate(pts)}
    fmat = np.array([[float(v) for v in row] for row in mat])

    def dist(x, y):
        return mat[index[x]][index[y]]

    return MetricSpace("finite", pts, {"distances": mat}, dist, lambda i, j: fmat[i, j])


def _interval(lo, hi, q: int) -> MetricSpace:
    lo, hi = as_fraction(lo), as_fraction(hi)
    if q <= 0:
        raise SpaceError("grid resolution q must be positive")
    if hi <= lo:
        raise SpaceError("interval needs lo < hi")
    pts = tuple(lo + (hi - lo) * k / q for k in range(q + 1))
    coords = np.array([float(p) for p in pts])

    def vdist(i, j):
        return np.abs(coords[i] - coords[j])

    return MetricSpace("interval", pts, {"lo": lo, "hi": hi, "q": q},
                       lambda x, y: abs(x - y), vdist)


def _circle(q: int) -> MetricSpace:
    if q <= 0:
        raise SpaceError("circle resolution q must be positive")
    pts = tuple(Fraction(k, q) for k in range(q))
    coords = np.array([float(p) for p in pts])

    def dist(x, y):
        t = abs(x - y)
        return min(t, 1 - t)

    def vdist(i, j):
        t = np.abs(coords[i] - coords[j])
        return np.minimum(t, 1 - t)

    return MetricSpace("circle", pts, {"q": q}, dist, vdist)


def _angle(n) -> float:
    return math.pi if n == INF else 2 * math.atan(n)


def zinf_distance(x, y) -> float:
    """Wrapped angular distance of ``2 atan`` images, normalized by pi."""
    t = abs(_angle(x) - _angle(y))
    return min(t, 2 * math.pi - t) / math.pi


def _zinf(N: int) -> MetricSpace:
    if N <= 0:
        raise SpaceError("truncation bound N must be positive")
    pts = tuple(range(-N, N + 1)) + (INF,)
    ang = np.array([_angle(p) for p in pts])

    def vdist(i, j):
        t = np.abs(ang[i] - ang[j])
        return np.minimum(t, 2 * np.pi - t) / np.pi

    return MetricSpace("zinf", pts, {"N": N}, zinf_distance, vdist, exact=False)


def _product(factors: Sequence[MetricSpace]) -> MetricSpace:
    if not factors:
        raise SpaceError("product needs at least one factor")
    import itertools

    pts = tuple(itertools.product(*(f.points for f in factors)))
    exact = all(f.exact for f in factors)
    sizes = [len(f) for f in factors]

    def dist(x, y):
        return max(f.distance(a, b) for f, a, b in zip(factors, x, y))

    def vdist(i, j):
        i, j = np.broadcast_arrays(i, j)
        out = np.zeros(i.shape)
        ii, jj = i.copy(), j.copy()
        for f, s in zip(reversed(factors), reversed(sizes)):
            out = np.maximum(out, f.dist_idx(ii % s, jj % s))
            ii, jj = ii // s, jj // s
        return out

    return MetricSpace("product", pts, {"factors": tuple(factors)}, dist, vdist, exact=exact)


def build_space(descriptor: dict) -> MetricSpace:
    """Construct a space from a descriptor record.

    Recognized descriptors::

        {"kind": "finite", "points": ["a", "b"], "distances": [[0, 1], [1, 0]]}
        {"kind": "finite", "points": [...], "distances": "discrete"}
        {"kind": "interval", "lo": -1, "hi": 1, "q": 4}
        {"kind": "circle", "q": 64}
        {"kind": "zinf", "N": 5}
        {"kind": "product", "factors": [<descriptor>, ...]}
    """
    if isinstance(descriptor, MetricSpace):
        return descriptor
    kind = descriptor.get("kind")
    if kind == "finite":
        return _finite(descriptor["points"], descriptor.get("distances", "discrete"))
    if kind == "interval":
        return _interval(descriptor.get("lo", 0), descriptor.get("hi", 1), int(descriptor["q"]))
    if kind == "circle":
        return _circle(int(descriptor["q"]))
    if kind in ("zinf", "compactified-integers"):
        return _zinf(int(descriptor["N"]))
    if kind == "product":
        return _product([build_space(d) for d in descriptor["factors"]])
    raise SpaceError(f"unknown space kind {kind!r}; expected one of {KINDS}")


def describe(space: MetricSpace) -> dict:
    """Inverse of :func:`build_space` (JSON-friendly where possible)."""
    if space.kind == "finite":
        mat = space.params["distances"]
        discrete = all(mat[i][j] == int(i != j) for i in range(len(mat)) for j in range(len(mat)))
        return {"kind": "finite", "points": list(space.points),
                "distances": "discrete" if discrete else [[str(v) for v in r] for r in mat]}
    if space.kind == "interval":
        p = space.params
        return {"kind": "interval", "lo": str(p["lo"]), "hi": str(p["hi"]), "q": p["q"]}
    if space.kind == "circle":
        return {"kind": "circle", "q": space.params["q"]}
    if space.kind == "zinf":
        return {"kind": "zinf", "N": space.params["N"]}
    return {"kind": "product", "factors": [describe(f) for f in space.params["factors"]]}


def two_point() -> MetricSpace:
    """``{a, b}`` with the discrete metric."""
    return _finite(["a", "b"], "discrete")
