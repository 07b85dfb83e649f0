"""Desk-scale acceptance suite; a summary line per criterion is printed at the end of the run."""

import math
import random
import time

import numpy as np
import pytest

from planarprob.cli import main
from planarprob.diagrams import TLElement, cup, cupcup, enumerate_tl, nested_cup
from planarprob.ensembles import EnsembleConfig, SamplerConfig, estimate_traces_gaussian, estimate_traces_graph
from planarprob.gibbs import estimate_gibbs
from planarprob.graphs import load_graph, pf_eigen, tl_to_graph
from planarprob.maps import PotentialTerm, gibbs_series, nc_partition_moments, on_model_series
from planarprob.poly import cup_poly, embed_tl, parse_poly
from planarprob.scalars import delta_eval
from planarprob.spectrum import spectral_histogram
from planarprob.tangles import boxtimes, eps, gram_numeric, power, trace_boxtimes, trace_tl, wedge
from planarprob.wick import normalized_moment, wick_oracle

QUARTIC = PotentialTerm(parse_poly("X1 X1* X1 X1*"))


def catalan(n: int) -> int:
    c = [1]
    for i in range(n):
        c.append(sum(c[j] * c[i - j] for j in range(i + 1)))
    return c[n]


def random_element(rng: random.Random, grade: int) -> TLElement:
    basis = enumerate_tl(grade)
    chosen = rng.sample(basis, rng.randint(1, min(3, len(basis))))
    return TLElement({d: rng.choice([-3, -2, -1, 1, 2, 3]) for d in chosen})


@pytest.mark.criterion(1, "TL dimensions 1,1,2,5,14,42,132 from the CLI in under 1 s")
def test_criterion_1_tl_dimensions(capsys):
    t0 = time.perf_counter()
    dims = []
    for k in range(7):
        assert main(["tl", "dim", "--k", str(k)]) == 0
        dims.append(int(capsys.readouterr().out))
    assert dims == [catalan(k) for k in range(7)] == [1, 1, 2, 5, 14, 42, 132]
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(2, "closure traces of cup powers equal non-crossing partition sums, p <= 6")
def test_criterion_2_free_poisson():
    t0 = time.perf_counter()
    for p in range(1, 7):
        assert trace_tl(power(cup(), p)) == nc_partition_moments(p)
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.criterion(3, "traciality, expectation-trace law, enveloping product associativity and trace")
def test_criterion_3_traciality():
    diagrams = [d for k in range(4) for d in enumerate_tl(k)]
    for a in diagrams:
        for b in diagrams:
            assert trace_tl(wedge(0, a, b)) == trace_tl(wedge(0, b, a))
    rng = random.Random(2024)
    for k in (1, 2):
        for _ in range(100):
            a = random_element(rng, rng.randint(k, k + 2))
            b = random_element(rng, rng.randint(k, k + 2))
            assert trace_tl(eps(k, wedge(k, a, b))) == trace_tl(eps(k, wedge(k, b, a)))
    for k in (0, 1, 2):
        for _ in range(100):
            a, b, c = (random_element(rng, 2) for _ in range(3))
            assert boxtimes(k, boxtimes(k, a, b), c) == boxtimes(k, a, boxtimes(k, b, c))
            assert trace_boxtimes(k, boxtimes(k, a, b)) == trace_boxtimes(k, boxtimes(k, b, a))


@pytest.mark.criterion(4, "Gram matrices positive semidefinite; kernel at 2cos(pi/5)")
def test_criterion_4_positivity():
    golden = 2 * math.cos(math.pi / 5)
    for delta in (golden, math.sqrt(2), 2.0, 2.5, 3.0):
        for k in range(5):
            assert np.linalg.eigvalsh(gram_numeric(k, delta)).min() >= -1e-8
    deficits = {k: len(enumerate_tl(k)) - np.linalg.matrix_rank(gram_numeric(k, golden), tol=1e-8)
                for k in range(5)}
    print(f"rank deficiency at 2cos(pi/5): {deficits}")
    assert any(deficits.values())


@pytest.mark.criterion(5, "K=2 Gaussian cup moments match 2, 6, 22 plus exact finite-N corrections")
def test_criterion_5_gaussian_limit():
    t0 = time.perf_counter()
    N = 128
    Qs = [cup_poly(2) ** p for p in (1, 2, 3)]
    res = estimate_traces_gaussian(Qs, EnsembleConfig(K=2, N=N, trials=200, seed=11))
    for p, (Q, r) in enumerate(zip(Qs, res), start=1):
        exact = normalized_moment(Q)
        assert exact.coefficient(0) == [2, 6, 22][p - 1]
        target = exact.evaluate(N)
        print(f"p={p}: {r.mean:.5f} +- {r.stderr:.5f}, exact at N={N}: {target:.6f}")
        assert r.within(target)
    assert time.perf_counter() - t0 < 300


@pytest.mark.criterion(6, "A3 graph ensemble cup moments at delta = sqrt 2")
def test_criterion_6_graph_ensemble():
    t0 = time.perf_counter()
    g = load_graph("a3")
    pf = pf_eigen(g)
    obs = [tl_to_graph(g, pf, power(cup(), p)) for p in (1, 2, 3)]
    res = estimate_traces_graph(obs, EnsembleConfig(mode="gaussian-graph", graph=g, N=256, trials=200, seed=3))
    for p, r in enumerate(res, start=1):
        target = delta_eval(nc_partition_moments(p), math.sqrt(2))
        print(f"p={p}: {r.mean:.5f} +- {r.stderr:.5f}, limit {target:.5f}")
        assert r.within(target)
    assert time.perf_counter() - t0 < 600


@pytest.mark.criterion(7, "planar enumerator equals the N -> infinity limit of the Wick oracle")
def test_criterion_7_oracle_arbitration():
    t0 = time.perf_counter()
    for Q in ("X1 X1*", "X1 X1* X1 X1*", "X1 X1* X1 X1* X1 X1*"):
        Q = parse_poly(Q)
        assert wick_oracle(Q, [QUARTIC], 3).planar() == gibbs_series(Q, [QUARTIC], 3)
    assert time.perf_counter() - t0 < 120


# -- criterion 8 ------------------------------------------------------------------------

BETA = 0.05


def quartic_closed_form(beta: float) -> tuple[float, float]:
    """Exact free Gibbs moments of exp(-N Tr(AA* + beta (AA*)^2)) at large N."""
    a2 = (math.sqrt(1 + 24 * beta) - 1) / (12 * beta)
    return (4 - a2) * a2 / 3, a2 ** 2 * (3 - a2)


@pytest.fixture(scope="module")
def gibbs_run():
    cfg = EnsembleConfig(mode="gibbs-poly", K=1, N=64, R=4.0, trials=48, seed=5,
                         potential=[(BETA, parse_poly("X1 X1* X1 X1*"))],
                         sampler=SamplerConfig(burn_in=300, steps=1500))
    t0 = time.perf_counter()
    res = estimate_gibbs([parse_poly("X1 X1*"), parse_poly("X1 X1* X1 X1*")], cfg)
    return res, time.perf_counter() - t0


@pytest.mark.criterion(8, "Gibbs Monte Carlo at beta = 0.05 against order-3 series jets")
def test_criterion_8_gibbs_vs_series(gibbs_run):
    res, wall = gibbs_run
    assert wall < 900
    failures = []
    for Q, r in zip(("X1 X1*", "X1 X1* X1 X1*"), res):
        jet = gibbs_series(parse_poly(Q), [QUARTIC], 3).evaluate([BETA])
        allowed = 3 * r.stderr + 0.02 * abs(jet)
        print(f"{Q}: {r.mean:.5f} +- {r.stderr:.5f}, jet {jet:.5f}, allowed {allowed:.5f}")
        if abs(r.mean - jet) > allowed:
            failures.append(f"{Q}: |{r.mean:.5f} - {jet:.5f}| > {allowed:.5f}")
    assert not failures, "; ".join(failures)


def test_gibbs_monte_carlo_matches_closed_form(gibbs_run):
    # the sampler is right; the jet is what falls short at this coupling
    res, _ = gibbs_run
    for r, exact in zip(res, quartic_closed_form(BETA)):
        assert abs(r.mean - exact) < 3 * r.stderr + 1e-3


def test_closed_form_jet_agrees_at_small_coupling():
    for beta in (0.005, 0.01):
        jets = [gibbs_series(parse_poly(Q), [QUARTIC], 3).evaluate([beta]) for Q in ("X1 X1*", "X1 X1* X1 X1*")]
        for jet, exact in zip(jets, quartic_closed_form(beta)):
            assert abs(jet - exact) < 0.002 * exact


def test_closed_form_taylor_coefficients_match_series():
    import sympy

    b = sympy.symbols("b")
    a2 = (sympy.sqrt(1 + 24 * b) - 1) / (12 * b)
    first = sympy.series((4 - a2) * a2 / 3, b, 0, 4).removeO()
    second = sympy.series(a2 ** 2 * (3 - a2), b, 0, 4).removeO()
    for expr, Q in ((first, "X1 X1*"), (second, "X1 X1* X1 X1*")):
        s = gibbs_series(parse_poly(Q), [QUARTIC], 3)
        assert [sympy.Rational(expr.coeff(b, m)) for m in range(4)] == [s.coefficient(m).coefficient(0) for m in range(4)]


# -- criteria 9 and 10 ------------------------------------------------------------------------

@pytest.mark.criterion(9, "loop-model coefficients are polynomials, specialize at 2, continue to sqrt 2")
def test_criterion_9_loop_model():
    tl = on_model_series(TLElement.of(cup()), (2, 2))
    assert all(c.is_polynomial() for c in tl.coefficients.values())
    pot = [PotentialTerm(embed_tl(2, cupcup()), 0), PotentialTerm(embed_tl(2, nested_cup()), 1)]
    poly = gibbs_series(cup_poly(2), pot, (2, 2))
    for mi in tl.multi_indices():
        assert tl.coefficient(mi).evaluate_exact(2) == poly.coefficient(mi).coefficient(0)
    values = {mi: delta_eval(tl.coefficient(mi), math.sqrt(2)) for mi in tl.multi_indices()}
    print("coefficients at delta = sqrt 2:", {k: round(v, 6) for k, v in values.items()})
    assert all(math.isfinite(v) for v in values.values())


@pytest.mark.criterion(10, "Marchenko-Pastur moments 1, 2, 5 within 2% and edge mass below 1% at N=512")
def test_criterion_10_marchenko_pastur():
    t0 = time.perf_counter()
    h = spectral_histogram(parse_poly("X1 X1*"), EnsembleConfig(K=1, N=512, trials=20, seed=1), bins=80)
    for p, target in zip((1, 2, 3), (1, 2, 5)):
        assert abs(h.moments[p] - target) <= 0.02 * target
    above = h.mass_above(4.1)
    print(f"moments {h.moments}, mass above 4.1: {above:.2e}")
    assert above < 0.01
    assert h.total_mass == pytest.approx(1.0)
    assert time.perf_counter() - t0 < 300
