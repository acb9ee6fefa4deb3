"""
Recurrence and sensitivity
===========================

Hitting-time sets, transitivity versus mixing, and sensitivity times at the
point and measure levels.
"""

import random
from fractions import Fraction

from measuredyn import build_zoo, dirac, induced
from measuredyn.detect import (
    decide_mixing,
    decide_transitive,
    hitting_times,
    pair_stats,
    sample_ball,
    sensitivity_times,
)

F = Fraction
swap = build_zoo("swap2")
print("N(a, b) =", hitting_times(swap, {"a"}, {"b"}, 10).members)
print("transitive:", decide_transitive(swap).status, "| mixing:", decide_mixing(swap).detail)

# Grid cells of fig1 give exact set dynamics because the grid is Markov.
fig = build_zoo("fig1", q=16)
print("fig1 cells transitive:", decide_transitive(fig, cells=True).status)

# Measures near delta_x separate at fewer times than points near x.
fig = build_zoo("fig1", q=64)
x, eps, delta = F(1, 8), F(1, 8), F(1, 2)
pts = sensitivity_times(fig, x, eps, delta / 2, 40)
ball, _ = sample_ball(fig.space, x, eps, 20, 20, random.Random(0))
meas = sensitivity_times(induced(fig), dirac(fig.space, x), eps, delta, 40, ball)
print("point times", pts.members, "\nmeasure times", meas.members, "\ninside:", meas.issubset(pts))

ps = pair_stats(build_zoo("zshift", N=5), -5, 5, 40, [F(1, 10)])
print("shift pair tail:", ps.tail_min, ps.tail_max, "Li-Yorke candidate:", ps.li_yorke_candidate(F(1, 10), F(1, 2)))
