"""Maps, non-autonomous schedules, example systems and induced measure dynamics.

Maps act on the points of a :class:`~measuredyn.space.MetricSpace`.  On grid
spaces a map is evaluated exactly on the continuum and the result is snapped
back to the nearest grid point (ties toward the smaller coordinate), so every
map is a total function on a finite set.  ``MapSpec.table`` compiles that
function into an index array for the vectorized code paths.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Sequence

import numpy as np

from .measure import DiscreteMeasure, prohorov_fast, pushforward
from .space import INF, MetricSpace, SpaceError, as_fraction, build_space, two_point

MAP_KINDS = ("identity", "table", "piecewise-linear", "polynomial", "circle-rotation",
             "circle-quadratic-inverse", "zshift", "composition")

FM_BLOCK_CAP = 10**6


class SystemError_(ValueError):
    """Raised for malformed maps or systems."""


@dataclass(frozen=True, eq=False)
class MapSpec:
    kind: str
    space: MetricSpace
    params: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise SystemError_(f"unknown map kind {self.kind!r}")
        if self.kind == "piecewise-linear":
            if self.space.kind != "interval":
                raise SystemError_("piecewise-linear maps live on interval spaces")
            nodes = self.params["nodes"]
            xs = [x for x, _ in nodes]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise SystemError_("breakpoints must be strictly increasing")
            lo, hi = self.space.params["lo"], self.space.params["hi"]
            if xs[0] != lo or xs[-1] != hi:
                raise SystemError_("breakpoints must span the whole interval")
            if any(not lo <= y <= hi for _, y in nodes):
                raise SystemError_("breakpoint values must stay inside the interval")
        if self.kind == "table":
            tab = self.params["table"]
            if set(tab) != set(self.space.points):
                raise SystemError_("table map must be total on the finite space")
            for y in tab.values():
                self.space.index(y)
        if self.kind == "composition":
            for c in self.params["components"]:
                if c.space is not self.space:
                    raise SystemError_("composition components must share the space")

    def __call__(self, x):
        return apply(self, x)

    def __repr__(self):
        return f"MapSpec({self.name or self.kind})"

    @cached_property
    def table(self) -> np.ndarray:
        """``table[i]`` is the index of the image of ``space.points[i]``."""
        idx = self.space.index
        return np.array([idx(self.evaluate(x)) for x in self.space.points], dtype=np.int64)

    @cached_property
    def _lookup(self) -> dict:
        pts = self.space.points
        return {x: pts[j] for x, j in zip(pts, self.table)}

    def evaluate(self, x):
        """Image of ``x`` computed from the formula (then snapped)."""
        k, p, sp = self.kind, self.params, self.space
        if k == "identity":
            return x
        if k == "table":
            return p["table"][x]
        if k == "piecewise-linear":
            return sp.snap(pl_value(p["nodes"], x))
        if k == "polynomial":
            v = sum(c * x**i for i, c in enumerate(p["coeffs"]))
            return sp.snap(v % 1 if sp.kind == "circle" else v)
        if k == "circle-rotation":
            return sp.snap((x + p["angle"]) % 1)
        if k == "circle-quadratic-inverse":
            return sp.snap(quadratic_inverse(p["linear"], p["square"], x))
        if k == "zshift":
            if x == INF:
                return INF
            y = x + p.get("step", 1)
            return y if y in sp else INF
        if k == "composition":
            for c in p["components"]:
                x = c(x)
            return x
        raise SystemError_(k)

    @cached_property
    def surjective(self) -> bool:
        return len(set(self.table.tolist())) == len(self.space)


def apply(f: MapSpec, x):
    if x not in f.space:
        raise SpaceError(f"{x!r} is outside the domain of {f!r}")
    return f._lookup[x]


def pl_value(nodes, x):
    """Connect-the-dots interpolation through ``nodes`` (exact for rationals)."""
    for (x0, y0), (x1, y1) in zip(nodes, nodes[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise SpaceError(f"{x!r} lies outside the breakpoint range")


def pl_image(nodes, lo, hi) -> tuple:
    """Exact image ``[min, max]`` of the closed interval ``[lo, hi]``."""
    vals = [pl_value(nodes, lo), pl_value(nodes, hi)]
    vals += [y for x, y in nodes if lo < x < hi]
    return min(vals), max(vals)


def quadratic_inverse(linear, square, y):
    """Root in ``[0, 1]`` of ``linear*x + square*x**2 = y``; exact when rational."""
    disc = Fraction(linear) ** 2 + 4 * Fraction(square) * Fraction(y)
    rn, rd = math.isqrt(disc.numerator), math.isqrt(disc.denominator)
    if rn * rn == disc.numerator and rd * rd == disc.denominator:
        root = Fraction(rn, rd)
    else:
        root = math.sqrt(disc)
    return (root - linear) / (2 * square)


def preimage_witness(f: MapSpec, y):
    """Least point (canonical order) mapped onto ``y``."""
    target = f.space.index(y)
    hits = np.nonzero(f.table == target)[0]
    if len(hits) == 0:
        raise SystemError_(f"not surjective at {y!r}")
    return f.space.points[int(hits[0])]


def compose(*maps: MapSpec, name: str = "") -> MapSpec:
    """Composition applying ``maps[0]`` first."""
    return MapSpec("composition", maps[0].space, {"components": tuple(maps)}, name)


def identity(space: MetricSpace) -> MapSpec:
    return MapSpec("identity", space, {}, "id")


def table_map(space: MetricSpace, table: dict, name: str = "") -> MapSpec:
    return MapSpec("table", space, {"table": dict(table)}, name)


# systems ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SystemDef:
    """Sequence ``f_0, f_1, ...`` of self-maps of one space.

    ``prefix`` is applied first, then ``cycle`` repeats forever.  A named
    schedule may instead supply ``lazy`` (``n -> MapSpec``), in which case the
    system is not known to be eventually periodic.
    """

    space: MetricSpace
    prefix: tuple = ()
    cycle: tuple = ()
    name: str = ""
    meta: dict = field(default_factory=dict)
    lazy: Callable[[int], MapSpec] | None = None

    def __post_init__(self):
        if self.lazy is None and not self.cycle:
            raise SystemError_("an eventually periodic system needs a nonempty cycle")
        for f in self.prefix + self.cycle:
            if f.space is not self.space:
                raise SystemError_("every map must act on the system's space")

    @property
    def eventually_periodic(self) -> bool:
        return self.lazy is None

    @property
    def autonomous(self) -> bool:
        return self.lazy is None and not self.prefix and len(self.cycle) == 1

    @property
    def preperiod(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.cycle)

    def map_at(self, n: int) -> MapSpec:
        if n < 0:
            raise SystemError_("time index must be nonnegative")
        if self.lazy is not None:
            return self.lazy(n)
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def phase(self, n: int) -> int:
        """Canonical time index with the same future maps as ``n``."""
        if n < len(self.prefix):
            return n
        return len(self.prefix) + (n - len(self.prefix)) % len(self.cycle)

    def __repr__(self):
        return f"SystemDef({self.name or 'system'} on {self.space!r})"


def autonomous(f: MapSpec, name: str = "") -> SystemDef:
    return SystemDef(f.space, (), (f,), name or f.name)


def periodic(maps: Sequence[MapSpec], name: str = "") -> SystemDef:
    if not maps:
        raise SystemError_("a periodic system needs at least one map")
    return SystemDef(maps[0].space, (), tuple(maps), name)


def listed(prefix: Sequence[MapSpec], tail: MapSpec, name: str = "") -> SystemDef:
    return SystemDef(tail.space, tuple(prefix), (tail,), name)


def orbit(system, x0, n: int) -> list:
    """``[x0, f_0(x0), f_1 f_0(x0), ...]`` of length ``n + 1``."""
    if n < 0:
        raise SystemError_("orbit length must be nonnegative")
    out = [x0]
    x = x0
    for k in range(n):
        x = system.map_at(k)(x)
        out.append(x)
    return out


def orbit_table(system: SystemDef, n: int) -> np.ndarray:
    """Index orbits of every point: row ``k`` holds ``f_0^k`` applied to all points."""
    S = len(system.space)
    out = np.empty((n + 1, S), dtype=np.int64)
    out[0] = np.arange(S)
    for k in range(n):
        out[k + 1] = system.map_at(k).table[out[k]]
    return out


# induced systems -------------------------------------------------------


@dataclass(frozen=True)
class Pushforward:
    """The induced map ``mu -> mu o f^{-1}``."""

    base: MapSpec

    def __call__(self, mu: DiscreteMeasure) -> DiscreteMeasure:
        return pushforward(self.base, mu)


@dataclass(frozen=True, eq=False)
class InducedSystem:
    """Measure-level system whose ``n``-th map pushes forward by ``base.map_at(n)``."""

    base: SystemDef

    @property
    def space(self) -> MetricSpace:
        return self.base.space

    def map_at(self, n: int) -> Pushforward:
        return Pushforward(self.base.map_at(n))

    @property
    def eventually_periodic(self) -> bool:
        return self.base.eventually_periodic

    @property
    def preperiod(self) -> int:
        return self.base.preperiod

    @property
    def period(self) -> int:
        return self.base.period

    def phase(self, n: int) -> int:
        return self.base.phase(n)

    @property
    def name(self) -> str:
        return f"induced({self.base.name})"

    def __repr__(self):
        return f"InducedSystem({self.base!r})"


def induced(system: SystemDef) -> InducedSystem:
    return InducedSystem(system)


def uniform_distance(f: MapSpec, g: MapSpec, sample: Sequence | None = None):
    """``sup_x d(f(x), g(x))`` over the sample (default: every point)."""
    sp = f.space
    pts = sp.points if sample is None else sample
    return max((sp.distance(f(x), g(x)) for x in pts), default=sp.zero())


def induced_uniform_distance(f: MapSpec, g: MapSpec, measures: Sequence[DiscreteMeasure]):
    """``sup_mu P(f_hat mu, g_hat mu)`` over the measure sample."""
    zero = f.space.zero()
    return max((prohorov_fast(pushforward(f, m), pushforward(g, m)) for m in measures), default=zero)


# example zoo -----------------------------------------------------------


def fig1_map(q: int = 16) -> MapSpec:
    """Piecewise-linear map of [-1, 1]: ``2x+2``, ``-2x``, ``-x`` on the three laps."""
    sp = build_space({"kind": "interval", "lo": -1, "hi": 1, "q": q})
    F = Fraction
    nodes = ((F(-1), F(0)), (F(-1, 2), F(1)), (F(0), F(0)), (F(1), F(-1)))
    return MapSpec("piecewise-linear", sp, {"nodes": nodes}, "fig1")


def ex34_map(q: int = 16) -> MapSpec:
    """``0`` on [0, 1/2] and ``2x - 1`` on (1/2, 1]."""
    sp = build_space({"kind": "interval", "lo": 0, "hi": 1, "q": q})
    F = Fraction
    nodes = ((F(0), F(0)), (F(1, 2), F(0)), (F(1), F(1)))
    return MapSpec("piecewise-linear", sp, {"nodes": nodes}, "ex34")


def ex35_map(q: int = 16) -> MapSpec:
    sp = build_space({"kind": "interval", "lo": 0, "hi": 1, "q": q})
    return MapSpec("polynomial", sp, {"coeffs": (Fraction(0), Fraction(0), Fraction(1))}, "ex35")


def swap_map() -> MapSpec:
    sp = two_point()
    return table_map(sp, {"a": "b", "b": "a"}, "swap2")


def fm_nodes(m: int) -> tuple:
    """Breakpoints of the connect-the-dots map ``F_m`` on [0, 1]."""
    F = Fraction
    a = [F(i, m) for i in range(m + 1)]
    c = [a[i] + F(1, 3 * m) for i in range(m)] + [F(1)]
    d = {i: a[i] + F(2, 3 * m) for i in range(m)}
    d[-1] = F(0)
    nodes = []
    for i in range(m):
        nodes += [(a[i], a[i]), (c[i], c[i + 1]), (d[i], d[i - 1])]
    nodes.append((F(1), F(1)))
    return tuple(nodes)


def fm_map(space: MetricSpace, m: int) -> MapSpec:
    return MapSpec("piecewise-linear", space, {"nodes": fm_nodes(m)}, f"F_{m}")


def fm_blocks(depth: int, cap: int = FM_BLOCK_CAP) -> list:
    """Block end times ``s_1 < ... < s_depth`` found by exact interval iteration.

    Block ``n`` applies ``F_n`` until every dyadic cell of level ``n``, already
    pushed through the earlier blocks, covers [0, 1].
    """
    s, out = 0, []
    history: list = []  # (m, length) per block
    one = (Fraction(0), Fraction(1))
    for n in range(1, depth + 1):
        nodes = fm_nodes(n)
        cells = [(Fraction(i, 2**n), Fraction(i + 1, 2**n)) for i in range(2**n)]
        imgs = []
        for J in cells:
            K = J
            for m, length in history:
                nm = fm_nodes(m)
                for _ in range(length):
                    K = pl_image(nm, *K)
            imgs.append(K)
        steps = 0
        while steps == 0 or any(K != one for K in imgs):
            if steps >= cap:
                raise SystemError_(f"F_{n} block did not cover [0, 1] within {cap} steps; "
                                   f"uncovered images: {[K for K in imgs if K != one][:3]}")
            imgs = [pl_image(nodes, *K) for K in imgs]
            steps += 1
        history.append((n, steps))
        s += steps
        out.append(s)
    return out


def word_maps(rot: MapSpec, quad: MapSpec, rot_inv: MapSpec, quad_inv: MapSpec):
    """``g_0, g_1, ...``: all words in {R, T} in length-lexicographic order, with inverses."""
    fwd = {"R": rot, "T": quad}
    bwd = {"R": rot_inv, "T": quad_inv}
    for length in itertools.count(1):
        for word in itertools.product("RT", repeat=length):
            w = "".join(word)
            # w = w1 o w2 o ... o wk applies wk first
            g = compose(*(fwd[c] for c in reversed(w)), name=w)
            ginv = compose(*(bwd[c] for c in w), name=w + "^-1")
            yield w, g, ginv


def golden_angle(min_den: int = 10**4) -> Fraction:
    """First Fibonacci convergent of ``(sqrt 5 - 1)/2`` with denominator >= ``min_den``."""
    a, b = 1, 1
    while b < min_den:
        a, b = b, a + b
    return Fraction(a, b)


ZOO = ("fig1", "ex34", "ex35", "swap2", "fm_schedule", "circle_wm", "zshift", "identity")


def build_zoo(name: str, **params) -> SystemDef:
    """Named example systems.

    ``fig1``, ``ex34``, ``ex35`` take grid resolution ``q``; ``fm_schedule``
    takes ``q`` and ``depth``; ``circle_wm`` takes ``q`` and ``min_den``;
    ``zshift`` takes the truncation ``N``; ``identity`` takes a space descriptor
    or a point count ``n``.
    """
    if name == "fig1":
        return autonomous(fig1_map(params.get("q", 16)), "fig1")
    if name == "ex34":
        return autonomous(ex34_map(params.get("q", 16)), "ex34")
    if name == "ex35":
        return autonomous(ex35_map(params.get("q", 16)), "ex35")
    if name == "swap2":
        return autonomous(swap_map(), "swap2")
    if name == "zshift":
        sp = build_space({"kind": "zinf", "N": params.get("N", 5)})
        return autonomous(MapSpec("zshift", sp, {"step": 1}, "shift"), "zshift")
    if name == "identity":
        desc = params.get("space") or {"kind": "finite", "points": [f"p{i}" for i in range(params.get("n", 2))]}
        sp = build_space(desc)
        return autonomous(identity(sp), "identity")
    if name == "fm_schedule":
        q, depth = params.get("q", 64), params.get("depth", 4)
        sp = build_space({"kind": "interval", "lo": 0, "hi": 1, "q": q})
        blocks = fm_blocks(depth, params.get("cap", FM_BLOCK_CAP))
        maps = {m: fm_map(sp, m) for m in range(1, depth + 1)}
        prefix, start = [], 0
        for m, end in enumerate(blocks, 1):
            prefix += [maps[m]] * (end - start)
            start = end
        tail = identity(sp)
        return SystemDef(sp, tuple(prefix), (tail,), "fm_schedule",
                         {"blocks": blocks, "depth": depth, "q": q},
                         lazy=lambda n, pre=tuple(prefix), t=tail: pre[n] if n < len(pre) else t)
    if name == "circle_wm":
        q = params.get("q", 64)
        sp = build_space({"kind": "circle", "q": q})
        alpha = params.get("angle") or golden_angle(params.get("min_den", 10**4))
        alpha = as_fraction(alpha)
        half = Fraction(1, 2)
        R = MapSpec("circle-rotation", sp, {"angle": alpha}, "R")
        Rinv = MapSpec("circle-rotation", sp, {"angle": -alpha}, "R^-1")
        T = MapSpec("polynomial", sp, {"coeffs": (Fraction(0), half, half)}, "T")
        Tinv = MapSpec("circle-quadratic-inverse", sp, {"linear": half, "square": half}, "T^-1")
        gen = word_maps(R, T, Rinv, Tinv)
        cache: list = []

        def lazy(n):
            while len(cache) <= n // 2:
                cache.append(next(gen))
            _, g, ginv = cache[n // 2]
            return g if n % 2 == 0 else ginv

        return SystemDef(sp, (), (), "circle_wm", {"angle": alpha, "q": q}, lazy=lazy)
    raise SystemError_(f"unknown zoo system {name!r}; expected one of {ZOO}")


def build_system(record: dict, space: MetricSpace | None = None) -> SystemDef:
    """System from a definition record (see the CLI definition-file format)."""
    if "zoo" in record:
        return build_zoo(record["zoo"], **record.get("params", {}))
    if space is None:
        raise SystemError_("a non-zoo system needs a space")
    gen = record.get("generator", "autonomous")
    if gen == "autonomous":
        return autonomous(build_map(record["map"], space), record.get("name", ""))
    if gen == "periodic":
        return periodic([build_map(m, space) for m in record["maps"]], record.get("name", ""))
    if gen == "listed":
        return listed([build_map(m, space) for m in record["prefix"]], build_map(record["tail"], space),
                      record.get("name", ""))
    raise SystemError_(f"unknown generator {gen!r}")


def build_map(record: dict, space: MetricSpace) -> MapSpec:
    kind = record["kind"]
    name = record.get("name", "")
    if kind == "identity":
        return identity(space)
    if kind == "table":
        return table_map(space, {space.point(k): space.point(v) for k, v in record["table"].items()}, name)
    if kind == "piecewise-linear":
        nodes = tuple((as_fraction(x), as_fraction(y)) for x, y in record["nodes"])
        return MapSpec(kind, space, {"nodes": nodes}, name)
    if kind == "polynomial":
        return MapSpec(kind, space, {"coeffs": tuple(as_fraction(c) for c in record["coeffs"])}, name)
    if kind == "circle-rotation":
        return MapSpec(kind, space, {"angle": as_fraction(record["angle"])}, name)
    if kind == "zshift":
        return MapSpec(kind, space, {"step": int(record.get("step", 1))}, name)
    if kind == "composition":
        return compose(*(build_map(c, space) for c in record["components"]), name=name)
    raise SystemError_(f"unknown map kind {kind!r}")
