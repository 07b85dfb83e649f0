from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from planarprob.diagrams import (EMPTY, MAX_TL_SIZE, TLDiagram, TLElement, cup, enumerate_tl,
                                 is_noncrossing, named_diagram, parse_diagram)
from planarprob.errors import ResourceLimitError, ValidationError
from planarprob.gluing import OUTPUT, Disk, GluingConfig, resolve_gluing
from planarprob.tangles import loop_count


def brute_force_matchings(n: int):
    """Every perfect matching of range(n), crossing or not."""
    if n == 0:
        yield ()
        return
    for j in range(1, n):
        rest = [i for i in range(1, n) if i != j]
        for m in brute_force_matchings(len(rest)):
            yield ((0, j),) + tuple((rest[a], rest[b]) for a, b in m)


def crosses(m) -> bool:
    return any(a < c < b < d or c < a < d < b for (a, b), (c, d) in combinations(m, 2))


def catalan_recursive(n: int) -> int:
    c = [1]
    for i in range(n):
        c.append(sum(c[j] * c[i - j] for j in range(i + 1)))
    return c[n]


@pytest.mark.parametrize("k", range(MAX_TL_SIZE + 1))
def test_counts_are_catalan(k):
    assert len(enumerate_tl(k)) == catalan_recursive(k)


@pytest.mark.parametrize("k", range(5))
def test_enumeration_matches_brute_force(k):
    brute = {frozenset(m) for m in brute_force_matchings(2 * k) if not crosses(m)}
    ours = {frozenset((a - 1, b - 1) for a, b in d.pairs) for d in enumerate_tl(k)}
    assert ours == brute


def test_small_enumerations():
    assert enumerate_tl(0) == [EMPTY]
    assert [d.encode() for d in enumerate_tl(2)] == ["2:[(1,2),(3,4)]", "2:[(1,4),(2,3)]"]
    assert enumerate_tl(4) == sorted(enumerate_tl(4))


def test_size_limit():
    with pytest.raises(ResourceLimitError):
        enumerate_tl(MAX_TL_SIZE + 1)


@pytest.mark.parametrize("pairs, expected", [
    ([(1, 2), (3, 4)], True),
    ([(1, 3), (2, 4)], False),
    ([(1, 6), (2, 3), (4, 5)], True),
])
def test_is_noncrossing(pairs, expected):
    assert is_noncrossing(pairs) is expected


def test_is_noncrossing_rejects_non_matching():
    with pytest.raises(ValidationError):
        is_noncrossing([(1, 2), (2, 3)])


def test_encoding_round_trip_and_errors():
    for d in enumerate_tl(3):
        assert parse_diagram(d.encode()) == d
    with pytest.raises(ValidationError):
        parse_diagram("2:[(1,3),(2,4)]")
    with pytest.raises(ValidationError):
        parse_diagram("2:[(1,2)]")
    with pytest.raises(ValidationError):
        named_diagram("cap")


def test_element_is_zero_free():
    x = TLElement({cup(): 1}) - TLElement({cup(): 1})
    assert x.is_zero() and len(x) == 0
    assert TLElement.unit().terms == {EMPTY: 1}


# -- gluing ---------------------------------------------------------------------

def test_cup_closed_by_one_strand():
    cfg = GluingConfig((Disk("x", 2),), ((("x", 0), ("x", 1)),))
    assert resolve_gluing(cfg, {"x": cup()}) == (EMPTY, 1)


def test_two_cups_straight_and_nested():
    straight = GluingConfig((Disk("a", 2), Disk("b", 2)),
                            ((("a", 0), ("b", 1)), (("a", 1), ("b", 0))))
    nested = GluingConfig((Disk("a", 2), Disk("b", 2)),
                          ((("a", 0), ("a", 1)), (("b", 0), ("b", 1))))
    assert resolve_gluing(straight, {"a": cup(), "b": cup()}) == (EMPTY, 1)
    assert resolve_gluing(nested, {"a": cup(), "b": cup()}) == (EMPTY, 2)


def test_free_loop_only():
    assert resolve_gluing(GluingConfig((), (), 0, free_loops=1), {}) == (EMPTY, 1)


def test_open_strands_give_output_matching():
    cfg = GluingConfig((Disk("x", 2),), (((OUTPUT, 0), ("x", 0)), (("x", 1), (OUTPUT, 1))), 2)
    assert resolve_gluing(cfg, {"x": cup()}) == (cup(), 0)


def test_gluing_errors():
    with pytest.raises(ValidationError, match="dangling"):
        GluingConfig((Disk("x", 2),), ())
    cfg = GluingConfig((Disk("x", 2),), ((("x", 0), ("x", 1)),))
    with pytest.raises(ValidationError):
        resolve_gluing(cfg, {"x": enumerate_tl(2)[0]})


def _relabel(cfg: GluingConfig, f) -> GluingConfig:
    disks = tuple(Disk(f(d.id), d.points) for d in cfg.disks)
    g = lambda p: p if p[0] is OUTPUT else (f(p[0]), p[1])
    return GluingConfig(disks, tuple((g(a), g(b)) for a, b in cfg.strings), cfg.output_points)


@given(st.data())
def test_gluing_invariant_under_disk_relabeling(data):
    k = data.draw(st.integers(1, 3))
    s = data.draw(st.sampled_from(enumerate_tl(k)))
    t = data.draw(st.sampled_from(enumerate_tl(k)))
    strings = tuple((("s", i), ("t", 2 * k - 1 - i)) for i in range(2 * k))
    cfg = GluingConfig((Disk("s", 2 * k), Disk("t", 2 * k)), strings)
    renamed = _relabel(cfg, lambda d: {"s": 7, "t": "other"}[d])
    assert resolve_gluing(cfg, {"s": s, "t": t}) == resolve_gluing(renamed, {7: s, "other": t})


@given(st.data())
def test_gluing_invariant_under_global_rotation(data):
    # rotating every disk's labels together with its content leaves the loop count unchanged
    k = data.draw(st.integers(1, 3))
    s = data.draw(st.sampled_from(enumerate_tl(k)))
    t = data.draw(st.sampled_from(enumerate_tl(k)))
    r = data.draw(st.integers(0, 2 * k - 1))
    n = 2 * k
    strings = tuple((("s", i), ("t", n - 1 - i)) for i in range(n))
    cfg = GluingConfig((Disk("s", n), Disk("t", n)), strings)

    def rot(d: TLDiagram, shift: int) -> TLDiagram:
        return TLDiagram(tuple((d.partner[(i - shift) % n] + shift) % n for i in range(n)))

    rstrings = tuple((("s", (i + r) % n), ("t", (n - 1 - i - r) % n)) for i in range(n))
    rcfg = GluingConfig((Disk("s", n), Disk("t", n)), rstrings)
    _, loops = resolve_gluing(cfg, {"s": s, "t": t})
    _, rloops = resolve_gluing(rcfg, {"s": rot(s, r), "t": rot(t, -r)})
    assert loops == rloops


@pytest.mark.parametrize("k", range(1, 6))
def test_self_pairing_closes_every_strand(k):
    assert all(loop_count(s, s) == k for s in enumerate_tl(k))
