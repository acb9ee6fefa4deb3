"""Deciders and bounded-horizon checks for recurrence, chains, shadowing and sensitivity."""

from .chains import (
    chain_closure,
    constructive_measure_chain,
    decide_chain_transitive,
    decide_shadowing,
    find_chain,
    interpolation_steps,
    pull_back,
    settle_time,
    two_point_pseudo_orbit,
    unshadowed,
    verify_two_point_nonshadowing,
)
from .claims import sample_ball, verify_arc_order_obstruction, verify_ball_separation, verify_shift_convergence
from .models import FiniteModel, as_model, cell_model, markov_exact, measure_model, point_model
from .recurrence import (
    decide_mixing,
    decide_transitive,
    decide_weak_mixing_order,
    hitting_times,
    set_orbit,
    time_patterns,
)
from .sensitivity import ball_candidates, pair_stats, sensitivity_times
from .types import Chain, PairStats, PropertyVerdict, TimeSet, jsonable
