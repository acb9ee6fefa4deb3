from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..measure import DiscreteMeasure, to_record, point_id

STATUSES = ("holds", "fails", "unknown")


def jsonable(obj: Any) -> Any:
    """Deterministic JSON-friendly form (exact rationals become ``"p/q"`` strings)."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, DiscreteMeasure):
        return to_record(obj)
    if isinstance(obj, float):
        if obj == float("inf"):
            return "inf"
        return obj
    if isinstance(obj, dict):
        return {str(jsonable(k)) if not isinstance(k, str) else k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = list(obj)
        if isinstance(obj, (frozenset, set)):
            items = sorted(items, key=repr)
        return [jsonable(v) for v in items]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return point_id(obj) if not hasattr(obj, "__dict__") else repr(obj)


@dataclass(frozen=True)
class PropertyVerdict:
    """Outcome of a decider or a claim check.

    ``holds`` from an exact decider is backed by an exhaustive or
    eventual-periodicity argument; ``horizon`` records any finite bound used.
    """

    status: str
    witness: Any = None
    horizon: int | None = None
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fails" and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def fails(self) -> bool:
        return self.status == "fails"

    def to_dict(self) -> dict:
        return {"status": self.status, "horizon": self.horizon, "detail": self.detail,
                "witness": jsonable(self.witness)}


@dataclass(frozen=True)
class Chain:
    """Finite ``delta``-pseudo-orbit; ``hop_slacks[i] = d(f_i(states[i]), states[i+1])``."""

    states: tuple
    delta: Any
    hop_slacks: tuple

    @property
    def length(self) -> int:
        return len(self.states) - 1

    @property
    def valid(self) -> bool:
        return all(h < self.delta for h in self.hop_slacks)

    def revalidate(self, system, distance) -> bool:
        """Recompute every hop and compare with the stored slacks."""
        if len(self.hop_slacks) != self.length:
            return False
        for i, (a, b) in enumerate(zip(self.states, self.states[1:])):
            if distance(system.map_at(i)(a), b) != self.hop_slacks[i]:
                return False
        return self.valid

    def to_dict(self) -> dict:
        return {"delta": jsonable(self.delta), "states": jsonable(self.states),
                "hop_slacks": jsonable(self.hop_slacks)}


@dataclass(frozen=True)
class TimeSet:
    """Finite-horizon time set (subset of ``[1, horizon]``) with density statistics."""

    horizon: int
    members: tuple

    def __post_init__(self):
        if any(not 1 <= m <= self.horizon for m in self.members):
            raise ValueError("members must lie in [1, horizon]")
        if list(self.members) != sorted(set(self.members)):
            raise ValueError("members must be sorted and distinct")

    def __contains__(self, n) -> bool:
        return n in set(self.members)

    def __len__(self):
        return len(self.members)

    def issubset(self, other: "TimeSet") -> bool:
        return set(self.members) <= set(other.members)

    @property
    def max_gap(self) -> int | None:
        """Largest gap between consecutive members (syndeticity proxy)."""
        if len(self.members) < 2:
            return None
        return max(b - a for a, b in zip(self.members, self.members[1:]))

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.members), self.horizon)

    @property
    def cofinite_at_horizon(self) -> bool:
        """Every time in the second half of the horizon is a member."""
        tail = range(self.horizon // 2 + 1, self.horizon + 1)
        s = set(self.members)
        return all(n in s for n in tail)

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "members": list(self.members), "max_gap": self.max_gap,
                "density": str(self.density), "cofinite_at_horizon": self.cofinite_at_horizon}


@dataclass(frozen=True)
class PairStats:
    """Orbit-distance statistics of a pair over times ``1..horizon``.

    ``lower``/``upper`` map each threshold ``t`` to the min/max, over the
    second half of the horizon, of the running fraction of times with
    distance ``< t``; ``tail_min``/``tail_max`` are taken over the same window.
    """

    horizon: int
    distances: tuple
    min_distance: Any
    max_distance: Any
    tail_min: Any
    tail_max: Any
    lower: dict = field(default_factory=dict)
    upper: dict = field(default_factory=dict)

    def li_yorke_candidate(self, tol, delta) -> bool:
        return self.tail_min < tol and self.tail_max > delta

    def to_dict(self) -> dict:
        return jsonable({"horizon": self.horizon, "min_distance": self.min_distance,
                         "max_distance": self.max_distance, "tail_min": self.tail_min,
                         "tail_max": self.tail_max, "lower": self.lower, "upper": self.upper})
