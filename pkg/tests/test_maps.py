from fractions import Fraction

import pytest

from planarprob.diagrams import TLElement, cup, cupcup, nested_cup
from planarprob.errors import ResourceLimitError, ValidationError
from planarprob.maps import (MapGluing, PotentialTerm, TruncatedSeries, gibbs_series, gluing_sum,
                             nc_partition_moments, nc_partitions, on_model_series, planar_gluings)
from planarprob.poly import cup_poly, embed_tl, parse_poly
from planarprob.scalars import DELTA, LaurentPoly, catalan
from planarprob.tangles import power, trace_tl

QUARTIC = PotentialTerm(parse_poly("X1 X1* X1 X1*"))


def d(*coeffs) -> LaurentPoly:
    """Polynomial in the loop parameter from ascending coefficients."""
    return LaurentPoly(dict(enumerate(coeffs)))


def crossing_free(part) -> bool:
    blocks = [set(b) for b in part]
    for x in blocks:
        for y in blocks:
            if x is not y:
                for a in x:
                    for b in x:
                        for c in y:
                            for e in y:
                                if a < c < b < e:
                                    return False
    return True


def set_partitions(elems):
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for p in set_partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p


@pytest.mark.parametrize("p", range(1, 8))
def test_nc_partitions_match_filtered_set_partitions(p):
    brute = sorted(sorted(len(b) for b in part) for part in set_partitions(list(range(p)))
                   if crossing_free(part))
    ours = sorted(sorted(len(b) for b in part) for part in nc_partitions(p))
    assert ours == brute
    assert len(ours) == catalan(p)


def test_nc_moment_examples():
    assert nc_partition_moments(1) == DELTA
    assert nc_partition_moments(2) == d(0, 1, 1)
    assert nc_partition_moments(3) == d(0, 1, 3, 1)


def test_nc_size_limit():
    with pytest.raises(ResourceLimitError):
        next(nc_partitions(13))


# -- gluings ----------------------------------------------------------------------

def test_map_gluing_genus():
    # two 2-stars joined straight across: sphere; the crossed quartic self-pairing: torus
    assert MapGluing((2, 2), (3, 2, 1, 0)).genus() == 0
    assert MapGluing((4,), (2, 3, 0, 1)).genus() == 1
    assert MapGluing((4,), (1, 0, 3, 2)).genus() == 0
    with pytest.raises(ValidationError):
        MapGluing((2,), (0, 1))


def test_planar_gluings_are_planar_and_connected():
    for sizes in [(2, 4), (4, 4), (2, 4, 4), (6, 2)]:
        for pairing in planar_gluings(sizes):
            g = MapGluing(sizes, pairing)
            assert g.genus() == 0 and g.components() == 1


def test_hand_counted_gluings_of_two_star_with_four_star():
    # the 2-star's X meets one of the two X* of the quartic; the rest is then forced
    assert len(list(planar_gluings((2, 4)))) == 4


@pytest.mark.parametrize("p", range(1, 6))
def test_order_zero_is_catalan(p):
    assert gluing_sum(parse_poly("X1 X1*") ** p, []) == catalan(p)


def test_half_edge_limit():
    with pytest.raises(ResourceLimitError) as info:
        gibbs_series(parse_poly("X1 X1*"), [QUARTIC], 6, max_half_edges=20)
    assert info.value.parameter == "orders"


# -- series ----------------------------------------------------------------------------

def test_order_zero_reduces_to_trace():
    s = gibbs_series(TLElement.of(cup()), [], ())
    assert s.coefficient() == trace_tl(cup()) == DELTA
    s2 = gibbs_series(power(cup(), 2), [], ())
    assert s2.coefficient() == nc_partition_moments(2)


@pytest.mark.parametrize("Q, expected", [
    ("X1 X1*", [1, -4, 36, -432]),
    ("X1 X1* X1 X1*", [2, -18, 216, -3024]),
    ("X1 X1* X1 X1* X1 X1*", [5, -72, 1080, -17280]),
])
def test_quartic_series_frozen(Q, expected):
    s = gibbs_series(parse_poly(Q), [QUARTIC], 3)
    assert [s.coefficient(m) for m in range(4)] == [LaurentPoly.const(c) for c in expected]


ON_MODEL = {
    (0, 0): d(0, 1),
    (1, 0): d(0, -2, -2), (0, 1): d(0, -2, -2),
    (2, 0): d(0, 8, 20, 8), (0, 2): d(0, 8, 20, 8),
    (1, 1): d(0, 24, 32, 16),
    (2, 1): d(0, -240, -528, -408, -120), (1, 2): d(0, -240, -528, -408, -120),
    (2, 2): d(0, 4480, 11584, 12608, 6272, 1344),
}


def test_on_model_series_frozen():
    s = on_model_series(TLElement.of(cup()), (2, 2))
    assert {mi: s.coefficient(mi) for mi in s.multi_indices()} == ON_MODEL


def test_on_model_coefficients_are_polynomials():
    s = on_model_series(TLElement.of(cup()), (2, 2))
    assert all(c.is_polynomial() for c in s.coefficients.values())


@pytest.mark.parametrize("K", [1, 2])
def test_on_model_specializes_to_letters(K):
    tl = on_model_series(TLElement.of(cup()), (2, 2))
    pot = [PotentialTerm(embed_tl(K, cupcup()), 0), PotentialTerm(embed_tl(K, nested_cup()), 1)]
    poly = gibbs_series(cup_poly(K), pot, (2, 2))
    for mi in tl.multi_indices():
        assert tl.coefficient(mi).evaluate_exact(K) == poly.coefficient(mi).coefficient(0)


def test_on_model_at_one_matches_single_letter_quartic():
    tl = on_model_series(TLElement.of(cup()), (3, 0))
    quartic = gibbs_series(parse_poly("X1 X1*"), [QUARTIC], 3)
    for m in range(4):
        assert tl.coefficient(m, 0).evaluate_exact(1) == quartic.coefficient(m).coefficient(0)


def test_symmetry_factor_by_hand():
    # order 1: minus the four hand-counted gluings; order 2 divides labeled counts by 2!
    s = gibbs_series(parse_poly("X1 X1*"), [QUARTIC], 2)
    assert s.coefficient(1) == LaurentPoly.const(-4)
    labeled = gluing_sum(parse_poly("X1 X1*"), [QUARTIC.body] * 2)
    assert s.coefficient(2) == labeled * Fraction(1, 2)


def test_potential_validation():
    with pytest.raises(ValidationError):
        PotentialTerm(parse_poly("X1 X1* + X1 X1* X1 X1*"))
    with pytest.raises(ValidationError):
        PotentialTerm(TLElement.unit())
    with pytest.raises(ValidationError):
        gibbs_series(parse_poly("X1 X1*"), [QUARTIC], (1, 1))
    with pytest.raises(ValidationError):
        TruncatedSeries((1,), {(2,): DELTA})


def test_series_json_round_trip_and_evaluate():
    s = on_model_series(TLElement.of(cup()), (1, 1))
    again = TruncatedSeries.from_json(s.to_json())
    assert again == s
    assert s.evaluate([0.0, 0.0], delta=2.0) == 2.0
    expected = 2 + 0.01 * (-12) + 0.02 * (-12) + 0.01 * 0.02 * (24 * 2 + 32 * 4 + 16 * 8)
    assert s.evaluate([0.01, 0.02], delta=2.0) == pytest.approx(expected, rel=1e-13)
