"""
Separated-set growth
=====================

Greedy lower bounds on (n, eps)-separated sets and the fitted growth rate.
"""

import math
from fractions import Fraction

from measuredyn import build_zoo
from measuredyn.entropy import entropy_estimate, induced_entropy_growth

fig = build_zoo("fig1", q=1024)
eps = [Fraction(1, 2**k) for k in (4, 5, 6)]
est = entropy_estimate(fig, None, eps, range(1, 11))
for e in eps:
    print(f"eps={e}:", [est.s(e, n) for n in range(1, 11)])
print(f"estimate {est.estimate:.4f} vs (1/2) log 2 = {math.log(2) / 2:.4f} ({est.label})")

# A finite permutation saturates immediately.
print("swap2:", entropy_estimate(build_zoo("swap2"), None, [Fraction(1, 2)], range(1, 8)).estimate)

# Dirac copies embed the base system in every measure grid.
g = induced_entropy_growth(build_zoo("swap2"), [2, 4, 8], None, Fraction(1, 4), 3)
for r in g["rows"]:
    print(r)
