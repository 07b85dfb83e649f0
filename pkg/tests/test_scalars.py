import math
from fractions import Fraction

import pytest
from hypothesis import given

from planarprob.errors import ValidationError
from planarprob.scalars import DELTA, ONE, ZERO, LaurentPoly, catalan, delta_eval

from conftest import laurent


def test_canonical_form_drops_zeros():
    p = LaurentPoly({0: 1, 2: 0, -1: Fraction(0)})
    assert p.coefficients == {0: 1}
    assert (DELTA - DELTA).is_zero()
    assert not ZERO


@pytest.mark.parametrize("poly, delta, expected", [
    (DELTA ** 2 + DELTA, 2.0, 6.0),
    (LaurentPoly({-1: 1}), 2.0, 0.5),
    (DELTA ** 3 + 3 * DELTA ** 2 + DELTA, math.sqrt(2), 2 * math.sqrt(2) + 6 + math.sqrt(2)),
])
def test_delta_eval(poly, delta, expected):
    assert delta_eval(poly, delta) == pytest.approx(expected, rel=1e-14)


def test_delta_eval_value_at_root_two():
    assert delta_eval(DELTA ** 3 + 3 * DELTA ** 2 + DELTA, math.sqrt(2)) == pytest.approx(10.2426, abs=1e-4)


def test_format_and_triples_round_trip():
    p = LaurentPoly({2: 1, 0: Fraction(-1, 2), -1: 3})
    assert LaurentPoly.from_triples(p.to_triples()) == p
    assert DELTA.format() == "d"
    assert ONE.format() == "1"


def test_division_by_monomial_and_power():
    assert (DELTA ** 3) / DELTA == DELTA ** 2
    assert DELTA ** -2 == LaurentPoly({-2: 1})


def test_catalan_numbers():
    assert [catalan(n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


@given(laurent(), laurent(), laurent())
def test_commutative_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a and a * ONE == a


@given(laurent(), laurent())
def test_evaluation_is_a_ring_map(a, b):
    x = 1.7
    assert delta_eval(a * b, x) == pytest.approx(delta_eval(a, x) * delta_eval(b, x), rel=1e-9, abs=1e-9)
    assert delta_eval(a + b, x) == pytest.approx(delta_eval(a, x) + delta_eval(b, x), rel=1e-9, abs=1e-9)


def test_nonpositive_delta_rejected():
    with pytest.raises(ValidationError):
        delta_eval(DELTA, 0.0)
