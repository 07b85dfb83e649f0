"""Tour of the Temperley-Lieb planar algebra: diagrams, products, traces, positivity.

Run: python3 demos/tl_algebra.py
"""

import math

import numpy as np

from planarprob.diagrams import cup, cupcup, enumerate_tl, nested_cup
from planarprob.scalars import delta_eval
from planarprob.tangles import boxtimes, eps, gram_numeric, include, power, trace_tl, wedge

# Non-crossing pairings of 2k points: the Catalan numbers.
print("dimensions:", [len(enumerate_tl(k)) for k in range(7)])
for d in enumerate_tl(2):
    print("  basis diagram", d.encode())

# Products glue diagrams and count each closed loop as a factor of d.
print("cupcup ^2 cupcup =", wedge(2, cupcup(), cupcup()))
print("cup ^1 nested    =", wedge(1, cup(), nested_cup()))

# The trace closes a diagram against every TL diagram; cup powers give
# free Poisson moments in d.
for p in range(1, 5):
    t = trace_tl(power(cup(), p))
    print(f"tau(cup^{p}) = {t.format()}   at d=2: {delta_eval(t, 2.0):g}")

# Conditional expectation undoes inclusion, and trace is tracial.
x = wedge(0, cup(), nested_cup())
print("eps_1(include(x)) == x:", eps(1, include(x)) == x)
print("tau(ab) == tau(ba):", trace_tl(wedge(0, cup(), nested_cup())) == trace_tl(wedge(0, nested_cup(), cup())))
print("enveloping product cup [x]_1 cup =", boxtimes(1, cup(), cup()))

# Positivity holds for d >= 2 and at 2cos(pi/n); at the golden value a kernel appears.
for delta in (2 * math.cos(math.pi / 5), math.sqrt(2), 2.0):
    ev = np.linalg.eigvalsh(gram_numeric(4, delta))
    print(f"k=4 Gram at d={delta:.4f}: min eigenvalue {ev.min():+.2e}, rank {int((ev > 1e-9).sum())}/14")
