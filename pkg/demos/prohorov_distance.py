"""
Prohorov distance between finitely supported measures
======================================================

Exact rational distances on grids, checked against subset enumeration.
"""

from fractions import Fraction

from measuredyn import dirac, mix, prohorov_bruteforce, prohorov_fast
from measuredyn.measure import worst_set
from measuredyn.space import build_space, two_point

# Two Dirac masses are min{d, 1} apart.
sp = build_space({"kind": "interval", "lo": -1, "hi": 1, "q": 8})
a, b = dirac(sp, Fraction(-1, 2)), dirac(sp, Fraction(1, 4))
print("P(delta_-1/2, delta_1/4) =", prohorov_fast(a, b))

# Moving mass costs its weight on a discrete space.
ab = two_point()
half = mix([(Fraction(1, 2), dirac(ab, "a")), (Fraction(1, 2), dirac(ab, "b"))])
print("P(delta_b, midpoint) =", prohorov_fast(dirac(ab, "b"), half))

# The fast path runs a max-flow per breakpoint; enumeration agrees exactly.
mu = mix([(Fraction(1, 3), a), (Fraction(2, 3), dirac(sp, Fraction(3, 4)))])
nu = mix([(Fraction(1, 2), b), (Fraction(1, 2), dirac(sp, Fraction(-1)))])
d = prohorov_fast(mu, nu)
print("P(mu, nu) =", d, "=", float(d), "| enumeration:", prohorov_bruteforce(mu, nu))

# Just below the distance there is a set A with mu(A) > nu(A^eps) + eps.
A, gap = worst_set(mu, nu, d - Fraction(1, 100))
print("violating set", sorted(A), "excess", gap)
