import math

import numpy as np
import pytest

from planarprob.diagrams import cup
from planarprob.ensembles import (EnsembleConfig, GraphEnsemble, SamplerConfig,
                                  estimate_trace_gaussian, estimate_traces_gaussian,
                                  estimate_traces_graph, rng_streams, run_trials, sample_gaussian)
from planarprob.errors import ValidationError
from planarprob.graphs import GraphElement, GraphLoop, load_graph, pf_eigen, star_graph, tl_to_graph
from planarprob.poly import cup_poly, parse_poly
from planarprob.tangles import power
from planarprob.wick import normalized_moment
from planarprob.poly import AltMonomial


def test_entry_variance():
    rng = np.random.default_rng(0)
    a = sample_gaussian(10, 10, rng, batch=1000)[:, 0, 0]
    sq = np.abs(a) ** 2
    mean, se = sq.mean(), sq.std(ddof=1) / math.sqrt(len(sq))
    assert abs(mean - 0.1) < 3 * se
    assert abs(a.mean()) < 3 * math.sqrt(0.1 / len(a))


def test_config_validation():
    with pytest.raises(ValidationError):
        EnsembleConfig(N=4)
    with pytest.raises(ValidationError):
        EnsembleConfig(trials=1)
    with pytest.raises(ValidationError):
        EnsembleConfig(mode="gibbs-poly")
    with pytest.raises(ValidationError):
        EnsembleConfig(mode="gibbs-poly", R=1.5)
    with pytest.raises(ValidationError):
        EnsembleConfig(mode="gaussian-graph")
    with pytest.raises(ValidationError):
        EnsembleConfig(potential=[(math.inf, parse_poly("X1 X1* X1 X1*"))])
    with pytest.raises(ValidationError):
        SamplerConfig(method="hmc")


def test_first_moment_exact_at_all_sizes():
    cfg = EnsembleConfig(K=1, N=128, trials=100, seed=1)
    r = estimate_trace_gaussian(parse_poly("X1 X1*"), cfg)
    assert r.within(1.0)
    assert r.trials == 100 and r.N == 128


def test_stderr_is_sample_sd_over_root_n():
    cfg = EnsembleConfig(K=1, N=16, trials=50, seed=3)

    def one(rng, count):
        return np.array([[rng.normal()] for _ in range(count)])

    data = run_trials(one, 50, 3, 1)[:, 0]
    from planarprob.ensembles import summarize

    r = summarize("x", data, 16, 0.0)
    assert r.stderr == pytest.approx(data.std(ddof=1) / math.sqrt(50), rel=1e-12)


def test_seed_determinism():
    cfg = EnsembleConfig(K=2, N=16, trials=20, seed=42, workers=2)
    Qs = [cup_poly(2), cup_poly(2) ** 2]
    a = estimate_traces_gaussian(Qs, cfg)
    b = estimate_traces_gaussian(Qs, cfg)
    assert [(r.mean, r.stderr) for r in a] == [(r.mean, r.stderr) for r in b]
    other = estimate_traces_gaussian(Qs, EnsembleConfig(K=2, N=16, trials=20, seed=43, workers=2))
    assert a[0].mean != other[0].mean


def test_streams_are_independent_per_worker():
    s = rng_streams(5, 3)
    draws = [g.standard_normal(4) for g in s]
    assert not np.allclose(draws[0], draws[1])
    assert np.array_equal(rng_streams(5, 3)[2].standard_normal(4), draws[2])


@pytest.mark.parametrize("N", [32, 64, 128])
def test_third_moment_matches_exact_finite_size_value(N):
    exact = normalized_moment(AltMonomial((1,) * 6))
    assert exact.coefficient(-2) == 1  # 5 + N^-2
    cfg = EnsembleConfig(K=1, N=N, trials=200, seed=N)
    r = estimate_trace_gaussian(parse_poly("X1 X1*") ** 3, cfg)
    assert r.within(exact.evaluate(N))


def test_finite_size_correction_decays_like_inverse_square():
    exact = normalized_moment(AltMonomial((1,) * 6))
    gaps = [exact.evaluate(N) - 5 for N in (32, 64, 128)]
    assert gaps[0] / gaps[1] == pytest.approx(4.0) and gaps[1] / gaps[2] == pytest.approx(4.0)


# -- graphs ------------------------------------------------------------------------

def test_estimator_normalization_gives_unit_trace(a3):
    ens = GraphEnsemble.build(a3, 64)
    unit = GraphElement({GraphLoop(v, ()): 1.0 for v in a3.even})
    from planarprob.words import WordEvaluator

    ev = WordEvaluator(ens.sample(np.random.default_rng(0)))
    assert ens.estimator(ens.words(unit), ev)[0] == pytest.approx(1.0, rel=1e-12)


def test_bond_graph_agrees_with_two_letter_model():
    g = load_graph("bond2")
    pf = pf_eigen(g)
    obs = [tl_to_graph(g, pf, power(cup(), p)) for p in (1, 2)]
    graph = estimate_traces_graph(obs, EnsembleConfig(mode="gaussian-graph", graph=g, N=48, trials=100, seed=2))
    poly = estimate_traces_gaussian([cup_poly(2), cup_poly(2) ** 2], EnsembleConfig(K=2, N=48, trials=100, seed=3))
    for a, b in zip(graph, poly):
        assert abs(a.mean - b.mean) < 3 * math.hypot(a.stderr, b.stderr)


def test_star_graph_has_norm_root_k():
    # K_{1,2} carries delta = sqrt(2), so its cup moment is sqrt(2), not the two-letter value 2
    g = star_graph(2)
    pf = pf_eigen(g)
    r = estimate_traces_graph([tl_to_graph(g, pf, cup())],
                              EnsembleConfig(mode="gaussian-graph", graph=g, N=64, trials=100, seed=4))[0]
    assert r.within(math.sqrt(2), slack=2e-3)
