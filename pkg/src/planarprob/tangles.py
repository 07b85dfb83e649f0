"""Planar-algebra operations on TL elements, each realized as a gluing.

Boundary conventions (all indices 0-based, clockwise from the first point):

* An element of ``P_{k+n}`` seen by the ``k``-strand product has ``k`` left
  points, ``2n`` middle points and ``k`` right points, in that order.
* An element of ``P_n`` seen by the enveloping product ``boxtimes(k, ...)``
  has ``k`` left, ``n-k`` top, ``k`` right and ``n-k`` bottom points.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .diagrams import EMPTY, TLDiagram, TLElement, as_element, enumerate_tl
from .errors import ValidationError
from .gluing import OUTPUT, Disk, GluingConfig, resolve_gluing
from .scalars import ONE, DeltaScalar, LaurentPoly, delta_eval

TraceValue = DeltaScalar

_DELTA_POW: dict[int, LaurentPoly] = {}


def _dpow(e: int) -> LaurentPoly:
    p = _DELTA_POW.get(e)
    if p is None:
        p = _DELTA_POW[e] = LaurentPoly.monomial(e)
    return p


# -- tangle builders (cached by shape) -------------------------------------

@lru_cache(maxsize=None)
def wedge_config(k: int, n: int, m: int) -> GluingConfig:
    """Tangle for the ``k``-strand product ``P_{k+n} x P_{k+m} -> P_{k+n+m}``."""
    a, b = "a", "b"
    strings = []
    out = 0
    for i in range(k + 2 * n):  # left and middle of a
        strings.append(((OUTPUT, out), (a, i)))
        out += 1
    for i in range(k, k + 2 * m + k):  # middle and right of b
        strings.append(((OUTPUT, out), (b, i)))
        out += 1
    for j in range(k):  # right of a meets left of b
        strings.append(((a, k + 2 * n + j), (b, k - 1 - j)))
    return GluingConfig((Disk(a, 2 * (k + n)), Disk(b, 2 * (k + m))), tuple(strings), out)


@lru_cache(maxsize=None)
def eps_config(k: int, n: int) -> GluingConfig:
    """Caps the ``k`` left strands onto the ``k`` right strands around the outside."""
    x = "x"
    strings = [((OUTPUT, i), (x, k + i)) for i in range(2 * n)]
    for j in range(k):
        strings.append(((x, j), (x, k + 2 * n + (k - 1 - j))))
    return GluingConfig((Disk(x, 2 * (k + n)),), tuple(strings), 2 * n)


@lru_cache(maxsize=None)
def include_config(k: int) -> GluingConfig:
    x = "x"
    strings = [((OUTPUT, 0), (OUTPUT, 2 * k + 1))]
    strings += [((OUTPUT, i + 1), (x, i)) for i in range(2 * k)]
    return GluingConfig((Disk(x, 2 * k),), tuple(strings), 2 * k + 2)


@lru_cache(maxsize=None)
def pairing_config(k: int) -> GluingConfig:
    """Two disks of ``2k`` points facing each other (point ``i`` meets ``2k-1-i``)."""
    strings = [(("x", i), ("y", 2 * k - 1 - i)) for i in range(2 * k)]
    return GluingConfig((Disk("x", 2 * k), Disk("y", 2 * k)), tuple(strings), 0)


@lru_cache(maxsize=None)
def boxtimes_config(k: int, n: int, m: int) -> GluingConfig:
    a, b = "a", "b"
    ta, tb = n - k, m - k
    L_a = [(a, i) for i in range(k)]
    T_a = [(a, k + i) for i in range(ta)]
    R_a = [(a, k + ta + i) for i in range(k)]
    B_a = [(a, 2 * k + ta + i) for i in range(ta)]
    L_b = [(b, i) for i in range(k)]
    T_b = [(b, k + i) for i in range(tb)]
    R_b = [(b, k + tb + i) for i in range(k)]
    B_b = [(b, 2 * k + tb + i) for i in range(tb)]
    order = L_a + T_a + T_b + R_b + B_b + B_a
    strings = [((OUTPUT, i), p) for i, p in enumerate(order)]
    strings += [(R_a[j], L_b[k - 1 - j]) for j in range(k)]
    return GluingConfig((Disk(a, 2 * n), Disk(b, 2 * m)), tuple(strings), len(order))


def _bilinear(a, b, op) -> TLElement:
    a, b = as_element(a), as_element(b)
    out: dict[TLDiagram, LaurentPoly] = {}
    for da, ca in a.items():
        for db, cb in b.items():
            d, scalar = op(da, db)
            c = ca * cb * scalar
            out[d] = out.get(d, LaurentPoly()) + c
    return TLElement(out)


# -- products ---------------------------------------------------------------

def wedge(k: int, a, b) -> TLElement:
    """Bilinear ``k``-strand product; closed loops contribute ``delta`` each."""

    def op(da: TLDiagram, db: TLDiagram):
        if da.k < k or db.k < k:
            raise ValidationError(f"grade below {k} in wedge product")
        if k == 0:
            return da.concat(db), ONE
        cfg = wedge_config(k, da.k - k, db.k - k)
        d, loops = resolve_gluing(cfg, {"a": da, "b": db})
        return d, _dpow(loops)

    return _bilinear(a, b, op)


def eps(k: int, x) -> TLElement:
    """Conditional expectation: cap ``k`` outer strands, normalize by ``delta**-k``."""
    x = as_element(x)
    out: dict[TLDiagram, LaurentPoly] = {}
    for d, c in x.items():
        if d.k < k:
            raise ValidationError(f"grade {d.k} below {k} in eps")
        if k == 0:
            res, loops = d, 0
        else:
            res, loops = resolve_gluing(eps_config(k, d.k - k), {"x": d})
        out[res] = out.get(res, LaurentPoly()) + c * _dpow(loops - k)
    return TLElement(out)


def include(x) -> TLElement:
    """Adds one through-strand joining a new first point to a new last point."""
    x = as_element(x)
    out = {}
    for d, c in x.items():
        res, _ = resolve_gluing(include_config(d.k), {"x": d})
        out[res] = c
    return TLElement(out)


def adjoint(x) -> TLElement:
    """Mirror every diagram; rational and delta coefficients are real."""
    x = as_element(x)
    return TLElement({d.reflect(): c for d, c in x.items()})


def boxtimes(k: int, a, b) -> TLElement:
    """Enveloping product: ``k`` horizontal strands join right of ``a`` to left of ``b``."""

    def op(da: TLDiagram, db: TLDiagram):
        if da.k < k or db.k < k:
            raise ValidationError(f"grade below {k} in boxtimes product")
        d, loops = resolve_gluing(boxtimes_config(k, da.k, db.k), {"a": da, "b": db})
        return d, _dpow(loops)

    return _bilinear(a, b, op)


# -- traces and forms ---------------------------------------------------------

def loop_count(s: TLDiagram, t: TLDiagram) -> int:
    """Loops formed by gluing ``s`` against the mirror image of ``t``."""
    if s.k != t.k:
        raise ValidationError("diagrams of different sizes")
    _, loops = resolve_gluing(pairing_config(s.k), {"x": s, "y": t.reflect()})
    return loops


@lru_cache(maxsize=None)
def _closure_weight(d: TLDiagram) -> LaurentPoly:
    total: dict[int, int] = {}
    cfg = pairing_config(d.k)
    for t in enumerate_tl(d.k):
        _, loops = resolve_gluing(cfg, {"x": d, "y": t})
        total[loops] = total.get(loops, 0) + 1
    return LaurentPoly(total)


def trace_tl(x) -> TraceValue:
    """Voiculescu trace: close with the sum of all TL diagrams, ``delta`` per loop.

    Linear; components of different grades are traced separately and summed.
    The unit has trace 1 and ``cup`` has trace ``delta``.
    """
    x = as_element(x)
    total = LaurentPoly()
    for d, c in x.items():
        enumerate_tl(d.k)  # enforces the size limit
        total = total + c * _closure_weight(d)
    return total


def gram_matrix(k: int) -> list[list[DeltaScalar]]:
    """``delta**loops(S, T)`` over the TL basis of size ``k`` (in enumeration order)."""
    basis = enumerate_tl(k)
    return [[_dpow(loop_count(s, t)) for t in basis] for s in basis]


def gram_numeric(k: int, delta: float) -> np.ndarray:
    return np.array([[delta_eval(c, delta) for c in row] for row in gram_matrix(k)])


def trace_boxtimes(k: int, x) -> TraceValue:
    """Trace for the enveloping product, normalized so the unit has trace 1.

    Left and right strands are capped around the top; the top and bottom
    boundaries are each closed with the sum of all TL diagrams.
    """
    x = as_element(x)
    total = LaurentPoly()
    for d, c in x.items():
        if d.k < k:
            raise ValidationError(f"grade {d.k} below {k} in trace_boxtimes")
        t = d.k - k
        if t % 2:
            continue
        cfg = _boxtimes_trace_config(k, d.k)
        weights: dict[int, int] = {}
        closers = enumerate_tl(t // 2)
        for top in closers:
            for bot in closers:
                _, loops = resolve_gluing(cfg, {"x": d, "top": top, "bottom": bot})
                weights[loops - k] = weights.get(loops - k, 0) + 1
        total = total + c * LaurentPoly(weights)
    return total


@lru_cache(maxsize=None)
def _boxtimes_trace_config(k: int, n: int) -> GluingConfig:
    x, top, bot = "x", "top", "bottom"
    t = n - k
    strings = [((x, j), (x, k + t + (k - 1 - j))) for j in range(k)]
    strings += [((x, k + i), (top, t - 1 - i)) for i in range(t)]
    strings += [((x, 2 * k + t + i), (bot, t - 1 - i)) for i in range(t)]
    return GluingConfig((Disk(x, 2 * n), Disk(top, t), Disk(bot, t)), tuple(strings), 0)


def power(x, p: int) -> TLElement:
    """``x`` multiplied with itself ``p`` times under the plain product."""
    result = TLElement.unit()
    for _ in range(p):
        result = wedge(0, result, x)
    return result


UNIT = TLElement.of(EMPTY)


def parse_tl_element(text: str) -> TLElement:
    """Parse sums such as ``"cup^2 + 1/2*nested"`` or ``"2:[(1,4),(2,3)]*cup"``.

    Factors are diagram names or encodings, optionally raised to a power;
    ``*`` between factors is the plain product.
    """
    from fractions import Fraction

    from .diagrams import named_diagram, parse_diagram

    total = TLElement()
    for pos, term in enumerate(_split_top(text, "+"), 1):
        term = term.strip()
        if not term:
            raise ValidationError(f"term {pos} of {text!r} is empty")
        coef = Fraction(1)
        value = TLElement.unit()
        for factor in _split_top(term, "*"):
            factor = factor.strip()
            try:
                coef *= Fraction(factor)
                continue
            except ValueError:
                pass
            base, _, exp = factor.partition("^")
            try:
                d = parse_diagram(base) if ":" in base else named_diagram(base.strip())
                p = int(exp) if exp else 1
            except (ValidationError, ValueError) as exc:
                raise ValidationError(f"term {pos}, factor {factor!r}: {exc}") from None
            value = wedge(0, value, power(d, p))
        total = total + value * LaurentPoly.const(coef)
    return total


def _split_top(text: str, sep: str) -> list[str]:
    # split on ``sep`` outside brackets and parentheses
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts
