"""Planar-map series of a quartic free Gibbs law, cross-checked by Wick calculus.

For V = AA* + beta (AA*)^2 the large-N moments are known in closed form,
which shows both the exactness of the coefficients and the finite radius
of convergence (beta = 1/24).

Run: python3 demos/planar_series.py
"""

import math

from planarprob.maps import PotentialTerm, gibbs_series, on_model_series
from planarprob.diagrams import TLElement, cup
from planarprob.poly import parse_poly
from planarprob.scalars import delta_eval
from planarprob.wick import wick_oracle

quartic = PotentialTerm(parse_poly("X1 X1* X1 X1*"))
Q = parse_poly("X1 X1*")

series = gibbs_series(Q, [quartic], 4)
print("tau(AA*) as a series in beta:", [str(series.coefficient(m)) for m in range(5)])

oracle = wick_oracle(Q, [quartic], 3)
print("Wick oracle, genus expansion of the first coefficients:")
for m in range(4):
    print(f"  beta^{m}:", oracle.coefficient(m))
print("planar part equals enumerator:", oracle.planar() == gibbs_series(Q, [quartic], 3))


def exact(beta):
    a2 = (math.sqrt(1 + 24 * beta) - 1) / (12 * beta)
    return (4 - a2) * a2 / 3


for beta in (0.01, 0.03, 0.05):
    print(f"beta={beta}: jet {series.evaluate([beta]):.5f}  closed form {exact(beta):.5f}")
print("beyond beta = 1/24 the truncated series stops tracking the law")

# Loop-model coefficients are polynomials in the loop parameter d.
loops = on_model_series(TLElement.of(cup()), (1, 1))
for mi in loops.multi_indices():
    c = loops.coefficient(mi)
    print(f"  coefficient {mi}: {c.format()}  (at d=sqrt2: {delta_eval(c, math.sqrt(2)):.4f})")
