"""Monte Carlo: Gaussian matrices, graph ensembles and Gibbs sampling meet the planar limits.

Run: python3 demos/random_matrices.py   (a few seconds)
"""

import math

from planarprob.diagrams import cup
from planarprob.ensembles import EnsembleConfig, SamplerConfig, estimate_traces_gaussian, estimate_traces_graph
from planarprob.gibbs import estimate_gibbs
from planarprob.graphs import load_graph, pf_eigen, tl_to_graph
from planarprob.maps import nc_partition_moments
from planarprob.poly import cup_poly, parse_poly
from planarprob.scalars import delta_eval
from planarprob.spectrum import spectral_histogram
from planarprob.tangles import power
from planarprob.wick import normalized_moment

# K Gaussian letters realize the TL trace at d = K, up to 1/N^2 corrections.
N = 96
Qs = [cup_poly(2) ** p for p in (1, 2, 3)]
for p, r in enumerate(estimate_traces_gaussian(Qs, EnsembleConfig(K=2, N=N, trials=100, seed=1)), 1):
    exact = normalized_moment(Qs[p - 1])
    print(f"K=2 p={p}: {r.mean:.4f} +- {r.stderr:.4f}   exact at N={N}: {exact.evaluate(N):.4f}")

# A bipartite graph realizes non-integer d: its Perron-Frobenius eigenvalue.
g = load_graph("a3")
pf = pf_eigen(g)
obs = [tl_to_graph(g, pf, power(cup(), p)) for p in (1, 2)]
res = estimate_traces_graph(obs, EnsembleConfig(mode="gaussian-graph", graph=g, N=128, trials=60, seed=2))
for p, r in enumerate(res, 1):
    lim = delta_eval(nc_partition_moments(p), math.sqrt(2))
    print(f"A3 p={p}: {r.mean:.4f} +- {r.stderr:.4f}   limit {lim:.4f}")

# Eigenvalues of AA* follow the Marchenko-Pastur law on [0, 4].
h = spectral_histogram(parse_poly("X1 X1*"), EnsembleConfig(K=1, N=256, trials=10, seed=3))
print("MP moments:", {p: round(m, 3) for p, m in h.moments.items()}, " mass above 4.1:", h.mass_above(4.1))

# Gibbs sampling with a quartic perturbation (small run).
cfg = EnsembleConfig(mode="gibbs-poly", K=1, N=24, R=4.0, trials=16, seed=4,
                     potential=[(0.02, parse_poly("X1 X1* X1 X1*"))],
                     sampler=SamplerConfig(burn_in=200, steps=600))
(r,) = estimate_gibbs([parse_poly("X1 X1*")], cfg)
a2 = (math.sqrt(1 + 24 * 0.02) - 1) / (12 * 0.02)
print(f"Gibbs tau(AA*) at beta=0.02: {r.mean:.4f} +- {r.stderr:.4f}   large-N value {(4 - a2) * a2 / 3:.4f}"
      f"   acceptance {r.extra['acceptance']:.2f}")
