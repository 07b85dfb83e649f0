"""Planar algebra of alternating polynomials in ``X_1..X_K`` and their adjoints.

A monomial ``X_{i1} X_{j1}* ... X_{ip} X_{jp}*`` is stored as its index tuple
``(i1, j1, ..., ip, jp)``; odd positions (1-based) are unstarred, even
positions starred.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .diagrams import TLDiagram, as_element
from .errors import ValidationError


@dataclass(frozen=True)
class AltMonomial:
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) % 2:
            raise ValidationError(f"alternating monomial needs even length, got {len(idx)}")
        if any(i < 1 for i in idx):
            raise ValidationError("letter indices start at 1")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_letters(cls, letters: Iterable[tuple[int, bool]]) -> "AltMonomial":
        letters = list(letters)
        for pos, (_, star) in enumerate(letters):
            if star != (pos % 2 == 1):
                raise ValidationError(
                    f"letter {pos + 1} breaks the X, X* alternation"
                )
        return cls(tuple(i for i, _ in letters))

    @property
    def letters(self) -> tuple[tuple[int, bool], ...]:
        return tuple((i, pos % 2 == 1) for pos, i in enumerate(self.indices))

    @property
    def degree(self) -> int:
        return len(self.indices)

    def __mul__(self, other: "AltMonomial") -> "AltMonomial":
        return AltMonomial(self.indices + other.indices)

    def adjoint(self) -> "AltMonomial":
        return AltMonomial(self.indices[::-1])

    def __str__(self):
        if not self.indices:
            return "1"
        return " ".join(f"X{i}*" if star else f"X{i}" for i, star in self.letters)

    def __lt__(self, other):
        return (self.degree, self.indices) < (other.degree, other.indices)


_TOKEN = re.compile(r"^X(\d+)(\*?)$")


def parse_monomial(text: str) -> AltMonomial:
    """Parse a token stream such as ``"X1 X1* X2 X2*"``; ``"1"`` or ``""`` is the unit."""
    tokens = text.split()
    if tokens in ([], ["1"]):
        return AltMonomial(())
    letters = []
    for pos, tok in enumerate(tokens):
        m = _TOKEN.match(tok)
        if not m:
            raise ValidationError(f"bad token {tok!r} at position {pos + 1}")
        letters.append((int(m.group(1)), bool(m.group(2))))
    return AltMonomial.from_letters(letters)


class PolyElement:
    """Rational linear combination of alternating monomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[AltMonomial, object] | None = None):
        clean: dict[AltMonomial, Fraction] = {}
        for m, c in (terms or {}).items():
            if not isinstance(m, AltMonomial):
                raise TypeError("keys must be AltMonomial")
            c = Fraction(c)
            if c:
                clean[m] = clean.get(m, Fraction(0)) + c
                if not clean[m]:
                    del clean[m]
        self._terms = clean

    @classmethod
    def of(cls, m: AltMonomial | str, c=1) -> "PolyElement":
        if isinstance(m, str):
            m = parse_monomial(m)
        return cls({m: c})

    @classmethod
    def unit(cls) -> "PolyElement":
        return cls({AltMonomial(()): 1})

    @property
    def terms(self) -> dict[AltMonomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (kv[0].degree, kv[0].indices))

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    @property
    def degrees(self) -> set[int]:
        return {m.degree for m in self._terms}

    @property
    def n_letters(self) -> int:
        return max((max(m.indices, default=0) for m in self._terms), default=0)

    def __add__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, 0) + c
        return PolyElement(terms)

    def __neg__(self):
        return PolyElement({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PolyElement):
            return poly_mul(self, other)
        c = Fraction(other)
        return PolyElement({m: v * c for m, v in self._terms.items()})

    def __rmul__(self, other):
        c = Fraction(other)
        return PolyElement({m: v * c for m, v in self._terms.items()})

    def __pow__(self, p: int):
        out = PolyElement.unit()
        for _ in range(p):
            out = poly_mul(out, self)
        return out

    def adjoint(self) -> "PolyElement":
        return PolyElement({m.adjoint(): c for m, c in self._terms.items()})

    def is_self_adjoint(self) -> bool:
        return self.adjoint() == self

    def __eq__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.items():
            parts.append(str(m) if c == 1 else f"{c}*{m}" if str(m) != "1" else str(c))
        return " + ".join(parts)

    def __repr__(self):
        return f"PolyElement({self})"


_LEXEME = re.compile(
    r"\s*(?:(?P<lp>\()|(?P<rp>\))|(?P<pow>\^\s*\d+)|(?P<plus>\+)"
    r"|(?P<coef>-?\d+(?:/\d+)?\s*\*)|(?P<letter>X\d+\*?)|(?P<one>1)|(?P<bad>\S))")


def _lex(text: str) -> list[tuple[str, str, int]]:
    out = []
    for m in _LEXEME.finditer(text):
        kind = m.lastgroup
        if kind is None:
            continue
        if kind == "bad":
            raise ValidationError(f"unexpected {m.group(kind)!r} at column {m.start(kind) + 1}")
        out.append((kind, m.group(kind), m.start(kind) + 1))
    return out


class _PolyParser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def where(self) -> str:
        return f"column {self.toks[self.i][2]}" if self.i < len(self.toks) else "end of input"

    def sum(self) -> PolyElement:
        out = self.term()
        while self.peek() == "plus":
            self.take()
            out = out + self.term()
        return out

    def term(self) -> PolyElement:
        coef = Fraction(1)
        if self.peek() == "coef":
            coef = Fraction(self.take()[1].rstrip("* \t"))
        factors = []
        while self.peek() in ("letter", "lp", "one"):
            factors.append(self.factor())
        if not factors:
            raise ValidationError(f"expected a monomial at {self.where()}")
        out = factors[0]
        for f in factors[1:]:
            out = poly_mul(out, f)
        return coef * out

    def factor(self) -> PolyElement:
        kind, _, col = self.toks[self.i]
        if kind == "one":
            self.take()
            base = PolyElement.unit()
        elif kind == "letter":
            letters = []
            while self.peek() == "letter":
                tok = self.take()[1]
                letters.append((int(tok[1:].rstrip("*")), tok.endswith("*")))
            try:
                base = PolyElement.of(AltMonomial.from_letters(letters))
            except ValidationError as exc:
                raise ValidationError(f"monomial at column {col}: {exc}") from None
        else:
            self.take()
            base = self.sum()
            if self.peek() != "rp":
                raise ValidationError(f"missing ')' at {self.where()}")
            self.take()
        if self.peek() == "pow":
            base = base ** int(self.take()[1].lstrip("^ \t"))
        return base


def parse_poly(text: str) -> PolyElement:
    """Parse sums like ``"X1 X1* + 2*X2 X2*"`` or ``"(X1 X1* + X2 X2*)^2"``.

    Juxtaposed factors multiply; every run of letters must alternate
    ``X``, ``X*`` starting unstarred.
    """
    parser = _PolyParser(text)
    if not parser.toks:
        raise ValidationError("empty polynomial")
    out = parser.sum()
    if parser.i != len(parser.toks):
        raise ValidationError(f"unexpected {parser.toks[parser.i][1]!r} at {parser.where()}")
    return out


def poly_mul(a: PolyElement, b: PolyElement) -> PolyElement:
    """Concatenation product, extended bilinearly."""
    terms: dict[AltMonomial, Fraction] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            m = ma * mb
            terms[m] = terms.get(m, 0) + ca * cb
    return PolyElement(terms)


def _diagram_monomials(d: TLDiagram, K: int) -> list[AltMonomial]:
    strands = [(i, j) for i, j in enumerate(d.partner) if i < j]
    out = []
    for labels in product(range(1, K + 1), repeat=len(strands)):
        idx = [0] * (2 * d.k)
        for (i, j), lab in zip(strands, labels):
            idx[i] = idx[j] = lab
        out.append(AltMonomial(tuple(idx)))
    return out


def embed_tl(K: int, x) -> PolyElement:
    """Image of a TL element in the ``K``-letter algebra (loop parameter ``K``).

    A diagram maps to the sum over labelings of its strands by ``1..K``; both
    endpoints of a strand carry the strand's label.
    """
    if K < 1:
        raise ValidationError("K must be at least 1")
    x = as_element(x)
    terms: dict[AltMonomial, Fraction] = {}
    for d, c in x.items():
        coef = c.evaluate_exact(K)
        for m in _diagram_monomials(d, K):
            terms[m] = terms.get(m, 0) + coef
    return PolyElement(terms)


def gaussian_trace_poly(w: AltMonomial | PolyElement, K: int | None = None) -> Fraction:
    """Number of non-crossing pairings of ``X_i`` with ``X_i*`` (same index).

    For a :class:`PolyElement` the count is extended linearly. ``K`` is only
    validated: every index must lie in ``1..K``.
    """
    if isinstance(w, PolyElement):
        return sum((c * gaussian_trace_poly(m, K) for m, c in w.items()), Fraction(0))
    if K is not None and any(i > K for i in w.indices):
        raise ValidationError(f"index above K={K} in {w}")
    idx = w.indices
    n = len(idx)

    @lru_cache(maxsize=None)
    def count(i: int, j: int) -> int:
        # non-crossing label-compatible pairings of positions i..j-1
        if i >= j:
            return 1
        total = 0
        for p in range(i + 1, j, 2):  # opposite parity means X meets X*
            if idx[p] == idx[i]:
                total += count(i + 1, p) * count(p + 1, j)
        return total

    return Fraction(count(0, n))


def cup_poly(K: int) -> PolyElement:
    """``sum_i X_i X_i*``."""
    return PolyElement({AltMonomial((i, i)): 1 for i in range(1, K + 1)})
