"""
Chains, trapping regions and shadowing
=======================================

Exact delta-chain reachability on grids and the induced two-point swap.
"""

from fractions import Fraction

from measuredyn import build_zoo, dirac, induced
from measuredyn.detect import (
    chain_closure,
    constructive_measure_chain,
    decide_shadowing,
    find_chain,
    unshadowed,
    verify_two_point_nonshadowing,
)

F = Fraction

# ex34 sends [0, 1/2] to 0; 0.3-chains from 0 never leave [0, 1/4].
ex34 = build_zoo("ex34", q=16)
reach = chain_closure(ex34, F(0), F(3, 10))
print("closure from 0:", [str(x) for x in sorted(reach)])
print("chain to 2/3:", find_chain(ex34, F(0), ex34.space.snap(F(2, 3)), F(3, 10)))

# On measures the swap is chain transitive: interpolate, then follow the map.
swap = build_zoo("swap2")
sp = swap.space
chain = constructive_measure_chain(induced(swap), dirac(sp, "a"), dirac(sp, "b"), F(1, 4), 10)
print("hops:", [str(h) for h in chain.hop_slacks])

# The swap shadows, its induced system does not.
print("base:", decide_shadowing(swap, F(1, 2), F(1, 2)).status)
v = decide_shadowing(induced(swap), F(1, 10), F(6, 25), q=20)
print("induced on M_20:", v.status, "with a", len(v.witness["pseudo_orbit"]) - 1, "step witness")
print("witness rechecked:", unshadowed(induced(swap), v.witness["pseudo_orbit"], F(1, 10), F(6, 25), q=20))

closed = verify_two_point_nonshadowing(F(1, 10))
print(closed.detail)
