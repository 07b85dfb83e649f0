import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planarprob.ensembles import sample_gaussian
from planarprob.poly import parse_poly
from planarprob.words import WordEvaluator, complex_gradient, cyclic_gradient, poly_words, trace_sum


def _energy(words, mats):
    return trace_sum(words, WordEvaluator(mats))[0]


def _finite_difference(words, mats, letter, h=1e-6):
    A = mats[letter]
    g = np.zeros(A.shape[1:], dtype=complex)
    for idx in np.ndindex(*A.shape[1:]):
        for unit, part in ((1.0, 1.0), (1j, 1j)):
            plus = {k: v.copy() for k, v in mats.items()}
            minus = {k: v.copy() for k, v in mats.items()}
            plus[letter][(0,) + idx] += h * unit
            minus[letter][(0,) + idx] -= h * unit
            d = (_energy(words, plus) - _energy(words, minus)) / (2 * h)
            g[idx] += d * part
    return g


@pytest.mark.parametrize("V", ["X1 X1* X1 X1*", "X1 X1* + X1 X2* X2 X1*", "X1 X2* X1 X2*"])
def test_gradient_matches_finite_differences(V):
    rng = np.random.default_rng(4)
    N = 8
    mats = {i: sample_gaussian(N, N, rng, 1) for i in (1, 2)}
    words = poly_words(parse_poly(V))
    ev = WordEvaluator(mats)
    G = complex_gradient(cyclic_gradient(words), ev, {i: (1, N, N) for i in (1, 2)})
    for letter in G:
        assert np.max(np.abs(G[letter][0] - _finite_difference(words, mats, letter))) < 1e-6


def test_quadratic_gradient_vanishes_at_origin():
    words = poly_words(parse_poly("X1 X1*"))
    mats = {1: np.zeros((1, 4, 4), dtype=complex)}
    G = complex_gradient(cyclic_gradient(words), WordEvaluator(mats), {1: (1, 4, 4)})
    assert not G[1].any()


def test_cyclic_gradient_rotations():
    words = poly_words(parse_poly("X1 X1* X1 X1*"))
    grad = cyclic_gradient(words)
    assert sorted((r, s) for _, r, s in grad[1]) == sorted([
        (((1, True), (1, False), (1, True)), False), (((1, False), (1, True), (1, False)), True),
        (((1, True), (1, False), (1, True)), False), (((1, False), (1, True), (1, False)), True)])


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_trace_of_word_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    mats = {i: sample_gaussian(5, 5, rng, 2) for i in (1, 2)}
    word = parse_poly("X1 X2* X2 X1*")
    ours = trace_sum(poly_words(word), WordEvaluator(mats))
    A, B = mats[1], mats[2]
    direct = np.trace(A @ B.conj().swapaxes(-1, -2) @ B @ A.conj().swapaxes(-1, -2), axis1=1, axis2=2).real
    assert ours == pytest.approx(direct, rel=1e-12)
