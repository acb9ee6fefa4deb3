"""Exact dynamics on finite metric spaces and their induced measure systems."""

__version__ = "0.1.0"

from .measure import (  # noqa: E402
    DiscreteMeasure,
    dirac,
    empirical,
    measure_grid,
    mix,
    prohorov,
    prohorov_bruteforce,
    prohorov_fast,
    pushforward,
)
from .space import MetricSpace, build_space, fatten  # noqa: E402
from .systems import InducedSystem, MapSpec, SystemDef, build_system, build_zoo, induced, orbit  # noqa: E402
