"""Exact Laurent polynomials with rational coefficients.

``LaurentPoly`` is the scalar ring for all symbolic computations. In the
Temperley-Lieb world the variable is the loop parameter and the alias
``DeltaScalar`` is used; the Wick oracle reuses the same class with the
matrix size ``N`` as the variable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

from .errors import ValidationError

Number = Union[int, Fraction]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"exact rational expected, got {type(c).__name__}")


class LaurentPoly:
    """Immutable sum of ``c_e * x**e`` with ``e`` an integer and ``c_e`` rational.

    Zero coefficients are never stored, so equality and hashing work on
    the canonical term dictionary.
    """

    __slots__ = ("_terms", "_hash", "var")

    def __init__(self, coefficients: Mapping[int, Number] | None = None, var: str = "d"):
        terms = {}
        if coefficients:
            for e, c in coefficients.items():
                c = _as_fraction(c)
                if c:
                    terms[int(e)] = c
        self._terms = terms
        self._hash = None
        self.var = var

    # construction helpers
    @classmethod
    def const(cls, c: Number, var: str = "d") -> "LaurentPoly":
        return cls({0: c}, var)

    @classmethod
    def monomial(cls, exponent: int, coefficient: Number = 1, var: str = "d") -> "LaurentPoly":
        return cls({exponent: coefficient}, var)

    @property
    def coefficients(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, exponent: int) -> Fraction:
        return self._terms.get(exponent, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_polynomial(self) -> bool:
        """True when no negative exponent carries a nonzero coefficient."""
        return all(e >= 0 for e in self._terms)

    @property
    def min_degree(self) -> int | None:
        return min(self._terms) if self._terms else None

    @property
    def max_degree(self) -> int | None:
        return max(self._terms) if self._terms else None

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        return LaurentPoly.const(_as_fraction(other), self.var)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return LaurentPoly(terms, self.var)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms.items()}, self.var)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms: dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(terms, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by a rational or by a single monomial is exact
        if isinstance(other, LaurentPoly):
            if len(other._terms) != 1:
                raise ZeroDivisionError("division by a non-monomial Laurent polynomial")
            (e, c), = other._terms.items()
            return LaurentPoly({k - e: v / c for k, v in self._terms.items()}, self.var)
        c = _as_fraction(other)
        return LaurentPoly({k: v / c for k, v in self._terms.items()}, self.var)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self._terms) != 1:
                raise ZeroDivisionError("negative power of a non-monomial")
            (e, c), = self._terms.items()
            return LaurentPoly({e * n: Fraction(1) / c ** (-n)}, self.var)
        result = LaurentPoly.const(1, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        try:
            return self._terms == LaurentPoly.const(_as_fraction(other))._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def evaluate(self, x) -> float:
        return delta_eval(self, x)

    def evaluate_exact(self, x: Number) -> Fraction:
        """Exact value at a nonzero rational point."""
        x = _as_fraction(x)
        return sum((c * x ** e for e, c in self._terms.items()), Fraction(0))

    def __repr__(self):
        return f"LaurentPoly({self.format()!r})"

    def format(self, var: str | None = None) -> str:
        """Human-readable form, highest power first: ``d^2 + 3*d + 1/2*d^-1``."""
        var = var or self.var
        if not self._terms:
            return "0"
        out = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                mono = var if e == 1 else f"{var}^{e}"
                body = mono if a == 1 else f"{a}*{mono}"
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    __str__ = format

    def to_triples(self) -> list[list[int]]:
        """``[exponent, numerator, denominator]`` triples, ascending exponent."""
        return [[e, c.numerator, c.denominator] for e, c in self.items()]

    @classmethod
    def from_triples(cls, triples: Iterable[Iterable[int]], var: str = "d") -> "LaurentPoly":
        return cls({int(e): Fraction(int(n), int(d)) for e, n, d in triples}, var)


DeltaScalar = LaurentPoly

ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
DELTA = LaurentPoly.monomial(1)


def delta_eval(s: LaurentPoly, delta: float) -> float:
    """Evaluate at a positive real point by Horner's rule on the shifted polynomial."""
    if delta <= 0:
        raise ValidationError("delta must be positive")
    if s.is_zero():
        return 0.0
    lo, hi = s.min_degree, s.max_degree
    acc = 0.0
    for e in range(hi, lo - 1, -1):
        acc = acc * delta + float(s.coefficient(e))
    return acc * delta ** lo if lo else acc


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)
