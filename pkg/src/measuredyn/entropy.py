"""Separated sets and finite-resolution (sequence) entropy estimates.

A set is ``(n, eps, A)``-separated when every pair of its points is more
than ``eps`` apart at one of the observation times ``a_1 < ... < a_n``.  The
estimator never claims the limit in ``eps`` and ``n``; it reports the fitted
growth rate of ``log s_n`` in ``a_n`` and reports 0 once the curve has saturated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .detect.models import FiniteModel, as_model
from .measure import dirac
from .space import FLOAT_TOL, as_fraction
from .systems import InducedSystem

EXACT_CAP = 64
ESTIMATE_LABEL = "finite-resolution lower-bound estimate"


@dataclass(frozen=True)
class TimeSequence:
    """Strictly increasing observation times ``a_1 < a_2 < ...`` (all ``>= 1``)."""

    entries: tuple
    rule: str = "explicit"

    def __post_init__(self):
        if self.rule not in ("explicit", "all-integers"):
            raise ValueError(f"unknown rule {self.rule!r}")
        e = self.entries
        if not e or e[0] < 1 or any(b <= a for a, b in zip(e, e[1:])):
            raise ValueError("entries must be strictly increasing positive integers")

    @classmethod
    def integers(cls, n: int) -> "TimeSequence":
        return cls(tuple(range(1, n + 1)), "all-integers")

    def prefix(self, n: int) -> tuple:
        if n > len(self.entries):
            if self.rule != "all-integers":
                raise ValueError(f"only {len(self.entries)} observation times are available")
            return tuple(range(1, n + 1))
        return self.entries[:n]

    def a(self, n: int) -> int:
        return self.prefix(n)[-1]


@dataclass
class EntropyEstimate:
    rows: list = field(default_factory=list)
    per_eps: dict = field(default_factory=dict)
    estimate: float = 0.0
    eps_range: tuple = ()
    n_range: tuple = ()
    label: str = ESTIMATE_LABEL

    def s(self, eps, n) -> int:
        for r in self.rows:
            if r["eps"] == eps and r["n"] == n:
                return r["s_n"]
        raise KeyError((eps, n))

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "label": self.label,
                "eps_range": [str(e) for e in self.eps_range], "n_range": list(self.n_range),
                "per_eps": {str(k): v for k, v in self.per_eps.items()},
                "rows": [{**r, "eps": str(r["eps"])} for r in self.rows]}

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eps", "n", "a_n", "s_n", "method", "rate"])
            for r in self.rows:
                w.writerow([str(r["eps"]), r["n"], r["a_n"], r["s_n"], r["method"], f"{r['rate']:.12g}"])


# orbits and Bowen distances --------------------------------------------


def _model(system, q):
    return as_model(system, q=q)


def _positions(model: FiniteModel, sample_idx: np.ndarray, times: Sequence[int]) -> np.ndarray:
    """Row ``k``: state indices of the sample at time ``times[k]``."""
    out = np.empty((len(times), len(sample_idx)), dtype=np.int64)
    pos = sample_idx.copy()
    t = 0
    for k, target in enumerate(times):
        while t < target:
            pos = model.step(t)[pos]
            t += 1
        out[k] = pos
    return out


class _Metric:
    """Vectorized distances between model states (coordinates for interval grids)."""

    def __init__(self, model: FiniteModel):
        self.model = model
        sp = model.system.space
        self.coords = None
        if model.kind == "points" and sp.kind == "interval":
            self.coords = np.array([float(p) for p in sp.points])
        elif model.kind == "points":
            self.space = sp
        else:
            S = len(model)
            self.D = np.array([[float(model.dist(i, j)) for j in range(S)] for i in range(S)])

    def __call__(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if self.coords is not None:
            return np.abs(self.coords[A] - self.coords[B])
        if self.model.kind == "points":
            return self.space.dist_idx(A, B)
        return self.D[A, B]


def _greedy(P: np.ndarray, metric: _Metric, thr: float) -> list:
    kept: list = []
    if metric.coords is not None:
        C = metric.coords[P]
        K = np.empty_like(C)
        for c in range(C.shape[1]):
            k = len(kept)
            if k and not (np.abs(K[:, :k] - C[:, c:c + 1]) > thr).any(axis=0).all():
                continue
            K[:, k] = C[:, c]
            kept.append(c)
        return kept
    for c in range(P.shape[1]):
        if kept and not (metric(P[:, kept], P[:, c:c + 1]) > thr).any(axis=0).all():
            continue
        kept.append(c)
    return kept


def _exact(model: FiniteModel, P: np.ndarray, eps) -> list:
    m = P.shape[1]
    G = nx.Graph()
    G.add_nodes_from(range(m))
    for i in range(m):
        for j in range(i + 1, m):
            if any(model.dist(int(P[t, i]), int(P[t, j])) > eps for t in range(P.shape[0])):
                G.add_edge(i, j)
    clique, _ = nx.max_weight_clique(G, weight=None)
    return sorted(clique)


def separated_set(system, sample: Sequence, n: int, eps, A: TimeSequence | None = None,
                  mode: str = "greedy", *, q: int | None = None) -> tuple:
    """Cardinality and witness of an ``(n, eps, A)``-separated subset of ``sample``.

    ``greedy`` keeps each sample point (in the given order) that is separated
    from everything kept so far, a lower bound.  ``exact`` solves maximum
    clique on the separation graph and is limited to 64 sample points.
    """
    if mode not in ("greedy", "exact"):
        raise ValueError("mode must be 'greedy' or 'exact'")
    model = _model(system, q)
    A = A or TimeSequence.integers(n)
    times = A.prefix(n)
    idx = np.array([model.index[s] for s in sample], dtype=np.int64)
    if len(idx) == 0:
        raise ValueError("empty sample")
    P = _positions(model, idx, times)
    if mode == "exact":
        if len(idx) > EXACT_CAP:
            raise ValueError(f"exact mode is capped at {EXACT_CAP} sample points; use mode='greedy'")
        chosen = _exact(model, P, eps if isinstance(eps, float) else as_fraction(eps))
    else:
        chosen = _greedy(P, _Metric(model), float(eps) + FLOAT_TOL)
    return len(chosen), [sample[i] for i in chosen]


def _rate(ns: list, a: dict, s: dict) -> float:
    """Least-squares slope of ``log s_n`` against ``a_n``.

    A curve that does not grow over the upper half of ``ns`` is treated as
    saturated (bounded cardinality, as for any finite autonomous system) and
    gets rate 0.
    """
    if len(ns) < 2 or s[ns[-1]] == s[ns[(len(ns) - 1) // 2]]:
        return 0.0
    x = np.array([a[n] for n in ns], dtype=float)
    y = np.log(np.array([s[n] for n in ns], dtype=float))
    return max(0.0, float(np.polyfit(x, y, 1)[0]))


def entropy_estimate(system, A: TimeSequence | None, eps_list: Sequence, n_list: Sequence[int],
                     sample: Sequence | None = None, *, mode: str = "greedy",
                     q: int | None = None) -> EntropyEstimate:
    """Separated-set table over ``eps_list x n_list`` and the growth-rate estimate.

    Reported ``s_n`` are running maxima over larger ``eps`` and smaller ``n``,
    which are still valid lower bounds because separation at a coarser scale or
    over fewer times implies separation here.  The rate for each ``eps`` is the
    fitted slope of ``log s_n`` in ``a_n`` (see :func:`_rate`); the estimate is
    the largest such rate.
    """
    if not eps_list or not n_list:
        raise ValueError("eps_list and n_list must be nonempty")
    model = _model(system, q)
    ns = sorted(set(n_list))
    A = A or TimeSequence.integers(ns[-1])
    if sample is None:
        sample = list(model.states)
    eps_sorted = sorted(eps_list, reverse=True)
    best: dict = {}
    rows = []
    per_eps = {}
    for eps in eps_sorted:
        s, a = {}, {}
        prev = 0
        for n in ns:
            card, _ = separated_set(model, sample, n, eps, A, mode)
            card = max(card, prev, best.get(n, 0))
            s[n], a[n], prev = card, A.a(n), card
            best[n] = card
        rate = _rate(ns, a, s)
        per_eps[eps] = rate
        for n in ns:
            rows.append({"eps": eps, "n": n, "a_n": a[n], "s_n": s[n],
                         "method": "exact" if mode == "exact" else "greedy-lower-bound",
                         "rate": math.log(s[n]) / a[n]})
    est = max(per_eps.values())
    return EntropyEstimate(rows, per_eps, est, (min(eps_list), max(eps_list)), (ns[0], ns[-1]))


def induced_entropy_growth(system, q_list: Sequence[int], A: TimeSequence | None, eps, n: int,
                           sample: Sequence | None = None, *, state_cap: int = 5000) -> dict:
    """Separated-set sizes of the induced system on ``M_q`` for increasing ``q``.

    Each row also records the base cardinality on ``sample`` (default: every
    point) and the size reached by the Dirac copies of those points inside
    ``M_q``; the Dirac map is an isometry, so the two agree and bound the
    induced value from below.
    """
    base = system.base if isinstance(system, InducedSystem) else system
    A = A or TimeSequence.integers(n)
    sp = base.space
    pts = list(sp.points if sample is None else sample)
    s_base, _ = separated_set(base, pts, n, eps, A)
    table, note, prev = [], "", 0
    for q in sorted(q_list):
        size = math.comb(q + len(sp) - 1, len(sp) - 1)
        if size > state_cap:
            note = f"stopped at q={q}: {size} measures exceed the cap {state_cap}"
            break
        model = as_model(InducedSystem(base), q=q)
        s_ind, _ = separated_set(model, model.states, n, eps, A)
        s_dirac, _ = separated_set(model, [dirac(sp, p) for p in pts], n, eps, A)
        s_ind = max(s_ind, s_dirac, prev)
        prev = s_ind
        table.append({"q": q, "states": size, "s_induced": s_ind, "s_dirac": s_dirac, "s_base": s_base})
    monotone = all(a["s_induced"] <= b["s_induced"] for a, b in zip(table, table[1:]))
    embedding = all(r["s_base"] <= r["s_dirac"] <= r["s_induced"] for r in table)
    return {"rows": table, "monotone": monotone, "embedding_holds": embedding, "note": note,
            "eps": str(eps), "n": n}
