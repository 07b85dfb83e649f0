"""Temperley-Lieb diagrams and formal linear combinations of them.

A diagram of size ``k`` is a non-crossing perfect matching of ``2k``
boundary points, numbered ``1..2k`` clockwise from the marked first point.
Internally the matching is stored 0-based as a partner tuple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .errors import ResourceLimitError, ValidationError
from .scalars import ONE, DeltaScalar, LaurentPoly

MAX_TL_SIZE = 8


def _check_perfect(partner: tuple[int, ...]) -> None:
    n = len(partner)
    if n % 2:
        raise ValidationError(f"odd number of points ({n})")
    for i, j in enumerate(partner):
        if not 0 <= j < n or j == i or partner[j] != i:
            raise ValidationError(f"not a perfect matching at point {i + 1}")


def _pairs_to_partner(pairs: Iterable[tuple[int, int]], n: int | None = None) -> tuple[int, ...]:
    pairs = [tuple(p) for p in pairs]
    if n is None:
        n = 2 * len(pairs)
    partner = [-1] * n
    for a, b in pairs:
        for x in (a, b):
            if not 1 <= x <= n:
                raise ValidationError(f"point {x} outside 1..{n}")
            if partner[x - 1] != -1:
                raise ValidationError(f"point {x} matched twice")
        if a == b:
            raise ValidationError(f"point {a} matched to itself")
        partner[a - 1], partner[b - 1] = b - 1, a - 1
    if -1 in partner:
        raise ValidationError(f"point {partner.index(-1) + 1} is unmatched")
    return tuple(partner)


def is_noncrossing(matching) -> bool:
    """True iff no two pairs interleave as ``a < c < b < d``.

    Accepts a :class:`TLDiagram`, a 0-based partner tuple, or a collection
    of 1-based pairs. Raises :class:`ValidationError` if the input is not a
    perfect matching.
    """
    if isinstance(matching, TLDiagram):
        partner = matching.partner
    elif matching and all(isinstance(p, int) for p in matching):
        partner = tuple(matching)
        _check_perfect(partner)
    else:
        partner = _pairs_to_partner(matching)
    # balanced-bracket scan
    stack = []
    for i, j in enumerate(partner):
        if i < j:
            stack.append(j)
        elif stack.pop() != i:
            return False
    return True


@dataclass(frozen=True, order=False)
class TLDiagram:
    """Non-crossing perfect matching on ``2k`` points."""

    partner: tuple[int, ...]
    k: int = field(init=False, compare=False)

    def __post_init__(self):
        partner = tuple(int(p) for p in self.partner)
        object.__setattr__(self, "partner", partner)
        _check_perfect(partner)
        object.__setattr__(self, "k", len(partner) // 2)
        if not is_noncrossing(partner):
            raise ValidationError(f"matching {self.pairs} has crossing strands")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], k: int | None = None) -> "TLDiagram":
        n = None if k is None else 2 * k
        return cls(_pairs_to_partner(pairs, n))

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """1-based pairs ``(a, b)`` with ``a < b``, sorted."""
        return tuple((i + 1, j + 1) for i, j in enumerate(self.partner) if i < j)

    @property
    def size(self) -> int:
        return self.k

    def sort_key(self):
        return (self.k, self.pairs)

    def __lt__(self, other: "TLDiagram"):
        return self.sort_key() < other.sort_key()

    def encode(self) -> str:
        return f"{self.k}:[" + ",".join(f"({a},{b})" for a, b in self.pairs) + "]"

    def __str__(self):
        return self.encode()

    def concat(self, other: "TLDiagram") -> "TLDiagram":
        shift = 2 * self.k
        return TLDiagram(self.partner + tuple(p + shift for p in other.partner))

    def reflect(self) -> "TLDiagram":
        """Mirror image: point ``i`` goes to ``2k + 1 - i``."""
        n = len(self.partner)
        return TLDiagram(tuple(n - 1 - self.partner[n - 1 - i] for i in range(n)))


_ENCODING = re.compile(r"^\s*(\d+)\s*:\s*\[(.*)\]\s*$")
_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_diagram(text: str) -> TLDiagram:
    """Parse the canonical ``k:[(a,b),...]`` encoding."""
    m = _ENCODING.match(text)
    if not m:
        raise ValidationError(f"cannot parse diagram encoding {text!r}")
    k = int(m.group(1))
    body = m.group(2)
    pairs = [(int(a), int(b)) for a, b in _PAIR.findall(body)]
    leftover = _PAIR.sub("", body).replace(",", "").strip()
    if leftover:
        raise ValidationError(f"unexpected text {leftover!r} in {text!r}")
    return TLDiagram.from_pairs(pairs, k)


def _matchings(points: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
    if not points:
        yield ()
        return
    first = points[0]
    # first point pairs with a point leaving an even count on each side
    for idx in range(1, len(points), 2):
        inner, outer = points[1:idx], points[idx + 1:]
        for a in _matchings(inner):
            for b in _matchings(outer):
                yield ((first, points[idx]),) + a + b


@lru_cache(maxsize=None)
def _enumerate(k: int) -> tuple[TLDiagram, ...]:
    out = [TLDiagram.from_pairs(sorted(m), k) for m in _matchings(tuple(range(1, 2 * k + 1)))]
    return tuple(sorted(out))


def enumerate_tl(k: int, max_size: int = MAX_TL_SIZE) -> list[TLDiagram]:
    """All TL diagrams of size ``k`` in lexicographic order of their pair lists."""
    if k < 0:
        raise ValidationError("k must be nonnegative")
    if k > max_size:
        raise ResourceLimitError(f"TL size {k} exceeds limit {max_size}", "k")
    return list(_enumerate(k))


EMPTY = TLDiagram(())


def _coerce_scalar(c) -> DeltaScalar:
    if isinstance(c, LaurentPoly):
        return c
    return LaurentPoly.const(c)


class TLElement:
    """Finite ``DeltaScalar``-linear combination of TL diagrams (any grades)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[TLDiagram, object] | None = None):
        clean = {}
        if terms:
            for d, c in terms.items():
                if not isinstance(d, TLDiagram):
                    raise TypeError("keys must be TLDiagram")
                c = _coerce_scalar(c)
                if c:
                    clean[d] = clean.get(d, LaurentPoly()) + c
                    if not clean[d]:
                        del clean[d]
        self._terms = clean

    @classmethod
    def of(cls, diagram: TLDiagram, coefficient=1) -> "TLElement":
        return cls({diagram: coefficient})

    @classmethod
    def zero(cls) -> "TLElement":
        return cls()

    @classmethod
    def unit(cls) -> "TLElement":
        return cls({EMPTY: ONE})

    @property
    def terms(self) -> dict[TLDiagram, DeltaScalar]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def grades(self) -> set[int]:
        return {d.k for d in self._terms}

    @property
    def grade(self) -> int:
        g = self.grades
        if len(g) != 1:
            raise ValidationError(f"element is not homogeneous (grades {sorted(g)})")
        return next(iter(g))

    def homogeneous_part(self, k: int) -> "TLElement":
        return TLElement({d: c for d, c in self._terms.items() if d.k == k})

    def coefficient(self, diagram: TLDiagram) -> DeltaScalar:
        return self._terms.get(diagram, LaurentPoly())

    def __add__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        terms = dict(self._terms)
        for d, c in other._terms.items():
            terms[d] = terms.get(d, LaurentPoly()) + c
        return TLElement(terms)

    def __neg__(self):
        return TLElement({d: -c for d, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, TLElement):
            return NotImplemented
        s = _coerce_scalar(scalar)
        return TLElement({d: c * s for d, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "TLElement(0)"
        body = " + ".join(f"({c})*{d}" for d, c in self.items())
        return f"TLElement({body})"


def as_element(x) -> TLElement:
    if isinstance(x, TLElement):
        return x
    if isinstance(x, TLDiagram):
        return TLElement.of(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a TL element")


def cup() -> TLDiagram:
    """The size-1 diagram, which is also the unit of the first higher product."""
    return TLDiagram((1, 0))


def cupcup() -> TLDiagram:
    return TLDiagram.from_pairs([(1, 2), (3, 4)])


def nested_cup() -> TLDiagram:
    return TLDiagram.from_pairs([(1, 4), (2, 3)])


def rainbow(k: int) -> TLDiagram:
    """Point ``i`` joined to ``2k + 1 - i``: the unit for the ``k``-strand product."""
    return TLDiagram(tuple(2 * k - 1 - i for i in range(2 * k)))


_NAMED = {
    "empty": lambda: EMPTY,
    "unit": lambda: EMPTY,
    "cup": cup,
    "cupcup": cupcup,
    "nested": nested_cup,
    "Cup": nested_cup,
}


def named_diagram(name: str) -> TLDiagram:
    try:
        return _NAMED[name]()
    except KeyError:
        if name.startswith("rainbow"):
            return rainbow(int(name[len("rainbow"):]))
        raise ValidationError(f"unknown diagram name {name!r}") from None
