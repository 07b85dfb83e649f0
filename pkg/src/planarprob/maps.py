"""Planar-map expansions of free Gibbs laws.

The coefficient of ``beta_1**m_1 ... beta_n**m_n`` in the free Gibbs law of an
observable ``Q`` is

    prod_j (-1)**m_j / m_j!  *  sum over gluings D  weight(D)

where ``D`` runs over pairings of the marked points of one ``Q`` disk and
``m_j`` labeled copies of each ``W_j`` disk such that the resulting map is
connected and has genus 0, and every string joins an unstarred point (odd
position) to a starred point (even position). ``weight(D)`` is
``delta**loops`` after substituting TL diagrams, or the number of consistent
labelings for alternating monomials.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .diagrams import TLDiagram, TLElement, as_element, cupcup, nested_cup
from .errors import ResourceLimitError, ValidationError
from .gluing import union_cycles
from .poly import AltMonomial, PolyElement
from .scalars import DeltaScalar, LaurentPoly, delta_eval

MAX_HALF_EDGES = 24
MAX_NC_SIZE = 12


# -- non-crossing partitions --------------------------------------------------

def nc_partitions(p: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All non-crossing partitions of ``{1..p}`` as tuples of sorted blocks."""
    if p > MAX_NC_SIZE:
        raise ResourceLimitError(f"p={p} exceeds the enumeration limit {MAX_NC_SIZE}", "p")
    yield from _nc(tuple(range(1, p + 1)))


def _nc(elems: tuple[int, ...]):
    if not elems:
        yield ()
        return
    first, rest = elems[0], elems[1:]
    # choose the other members of the block containing ``first``
    for r in range(len(rest) + 1):
        for others in itertools.combinations(range(len(rest)), r):
            block = (first,) + tuple(rest[i] for i in others)
            cuts = [-1] + list(others) + [len(rest)]
            gaps = [rest[cuts[i] + 1:cuts[i + 1]] for i in range(len(cuts) - 1)]
            for parts in itertools.product(*(list(_nc(g)) for g in gaps)):
                yield (block,) + tuple(b for part in parts for b in part)


def nc_partition_moments(p: int) -> DeltaScalar:
    """``sum over NC(p)`` of ``delta**(number of blocks)``: free Poisson moments."""
    if p < 1:
        raise ValidationError("p must be positive")
    counts: dict[int, int] = {}
    for part in nc_partitions(p):
        counts[len(part)] = counts.get(len(part), 0) + 1
    return LaurentPoly(counts)


# -- series container ---------------------------------------------------------

@dataclass
class TruncatedSeries:
    """Truncated power series in the couplings.

    ``mode`` is ``"delta"`` (coefficients are Laurent polynomials in the loop
    parameter, constants in the polynomial case) or ``"oracle"`` (Laurent
    polynomials in the matrix size ``N``).
    """

    orders: tuple[int, ...]
    coefficients: dict[tuple[int, ...], LaurentPoly]
    mode: str = "delta"
    observable: str = ""
    couplings: tuple[str, ...] = ()

    def __post_init__(self):
        self.orders = tuple(self.orders)
        clean = {}
        for mi, c in self.coefficients.items():
            mi = tuple(mi)
            if len(mi) != len(self.orders) or any(not 0 <= a <= b for a, b in zip(mi, self.orders)):
                raise ValidationError(f"multi-index {mi} outside truncation {self.orders}")
            if c:
                clean[mi] = c
        self.coefficients = clean
        if not self.couplings:
            self.couplings = tuple(f"beta{j + 1}" for j in range(len(self.orders)))

    def coefficient(self, *mi: int) -> LaurentPoly:
        if len(mi) == 1 and isinstance(mi[0], tuple):
            mi = mi[0]
        return self.coefficients.get(tuple(mi), LaurentPoly(var=self._var))

    @property
    def _var(self) -> str:
        return "N" if self.mode == "oracle" else "d"

    def multi_indices(self):
        return itertools.product(*(range(o + 1) for o in self.orders))

    def evaluate(self, betas: Sequence[float], delta: float | None = None, N: float | None = None,
                 max_total: int | None = None) -> float:
        """Numerical value of the jet at the given couplings."""
        x = N if self.mode == "oracle" else delta
        total = []
        for mi, c in self.coefficients.items():
            if max_total is not None and sum(mi) > max_total:
                continue
            if c.is_polynomial() and c.max_degree == 0:
                val = float(c.coefficient(0))
            else:
                if x is None:
                    raise ValueError("coefficient depends on the variable; supply it")
                val = delta_eval(c, x)
            total.append(val * math.prod(b ** m for b, m in zip(betas, mi)))
        return math.fsum(total)

    def planar(self) -> "TruncatedSeries":
        """Oracle mode only: keep the ``N**0`` part of every coefficient."""
        if self.mode != "oracle":
            raise ValidationError("planar() applies to oracle-mode series")
        return TruncatedSeries(
            self.orders,
            {mi: LaurentPoly.const(c.coefficient(0)) for mi, c in self.coefficients.items()},
            "delta", self.observable, self.couplings,
        )

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "variable": self._var,
            "observable": self.observable,
            "couplings": list(self.couplings),
            "orders": list(self.orders),
            "coefficients": [
                {"index": list(mi), "terms": c.to_triples()}
                for mi, c in sorted(self.coefficients.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        var = data.get("variable", "d")
        coeffs = {
            tuple(item["index"]): LaurentPoly.from_triples(item["terms"], var)
            for item in data["coefficients"]
        }
        return cls(tuple(data["orders"]), coeffs, data.get("mode", "delta"),
                   data.get("observable", ""), tuple(data.get("couplings", ())))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.orders == other.orders and self.coefficients == other.coefficients


# -- potentials ---------------------------------------------------------------

Body = Union[TLElement, PolyElement]


@dataclass(frozen=True)
class PotentialTerm:
    body: Body
    coupling_index: int = 0

    def __post_init__(self):
        body = self.body
        if isinstance(body, TLDiagram):
            body = TLElement.of(body)
            object.__setattr__(self, "body", body)
        if isinstance(body, TLElement):
            g = body.grades
            if len(g) != 1:
                raise ValidationError("potential term must be homogeneous")
            if min(g) < 1:
                raise ValidationError("TL potential term needs grade at least 1")
        elif isinstance(body, PolyElement):
            if len(body.degrees) != 1 or 0 in body.degrees:
                raise ValidationError("potential term must be a homogeneous nonconstant polynomial")
        else:
            raise TypeError("body must be a TLElement or PolyElement")

    @property
    def points(self) -> int:
        if isinstance(self.body, TLElement):
            return 2 * self.body.grade
        return next(iter(self.body.degrees))


def _disk_contents(body) -> tuple[str, list, int]:
    """``(mode, [(coef, data)], points)`` for a disk body."""
    if isinstance(body, (TLDiagram, TLElement)):
        el = as_element(body)
        g = el.grades
        if len(g) != 1:
            raise ValidationError("observable must be homogeneous")
        return "tl", [(c, d.partner) for d, c in el.items()], 2 * next(iter(g))
    if isinstance(body, AltMonomial):
        body = PolyElement.of(body)
    if isinstance(body, PolyElement):
        if len(body.degrees) != 1:
            raise ValidationError("observable must be homogeneous")
        return "poly", [(c, m.indices) for m, c in body.items()], next(iter(body.degrees))
    raise TypeError(f"unsupported body {type(body).__name__}")


# -- planar gluing enumeration --------------------------------------------------

@dataclass(frozen=True)
class MapGluing:
    """A pairing of half-edges on disks with cyclically ordered points.

    ``sizes[d]`` is the number of points of disk ``d`` (disk 0 is the
    observable); half-edges are numbered disk by disk. ``pairing[h]`` is the
    partner of half-edge ``h``.
    """

    sizes: tuple[int, ...]
    pairing: tuple[int, ...]
    _offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        offs, o = [], 0
        for s in self.sizes:
            offs.append(o)
            o += s
        object.__setattr__(self, "_offsets", tuple(offs))
        if len(self.pairing) != o:
            raise ValidationError("pairing length does not match the disks")
        for h, p in enumerate(self.pairing):
            if p == h or self.pairing[p] != h:
                raise ValidationError("pairing is not a perfect matching")

    def rotation(self) -> list[int]:
        rot = []
        for off, s in zip(self._offsets, self.sizes):
            rot.extend(off + (i + 1) % s for i in range(s))
        return rot

    def disk_of(self) -> list[int]:
        return [d for d, s in enumerate(self.sizes) for _ in range(s)]

    def faces(self) -> int:
        rot, alpha = self.rotation(), self.pairing
        seen = [False] * len(alpha)
        f = 0
        for h in range(len(alpha)):
            if not seen[h]:
                f += 1
                x = h
                while not seen[x]:
                    seen[x] = True
                    x = rot[alpha[x]]
        return f

    def components(self) -> int:
        parent = list(range(len(self.sizes)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        dof = self.disk_of()
        for h, p in enumerate(self.pairing):
            parent[find(dof[h])] = find(dof[p])
        return len({find(d) for d in range(len(self.sizes))})

    def genus(self) -> int:
        v, e, f, c = len(self.sizes), len(self.pairing) // 2, self.faces(), self.components()
        two_g = 2 * c - v + e - f
        return two_g // 2


def planar_gluings(sizes: Sequence[int], max_half_edges: int = MAX_HALF_EDGES) -> Iterator[tuple[int, ...]]:
    """Connected genus-0 gluings of labeled disks, grown from disk 0.

    Strings always join an odd-position point to an even-position point.
    Each gluing is produced exactly once.
    """
    sizes = tuple(sizes)
    n = sum(sizes)
    if n > max_half_edges:
        raise ResourceLimitError(
            f"{n} half-edges exceed the limit {max_half_edges}", "max_half_edges")
    if any(s % 2 for s in sizes):
        raise ValidationError("every disk needs an even number of points")
    offsets, o = [], 0
    for s in sizes:
        offsets.append(o)
        o += s
    rot = [0] * n
    star = [False] * n
    for off, s in zip(offsets, sizes):
        for i in range(s):
            rot[off + i] = off + (i + 1) % s
            star[off + i] = i % 2 == 1
    alpha = [-1] * n
    in_comp = [False] * n
    used = [False] * len(sizes)

    def attach(d: int, flag: bool):
        used[d] = flag
        for h in range(offsets[d], offsets[d] + sizes[d]):
            in_comp[h] = flag

    attach(0, True)
    remaining = [len(sizes) - 1]

    def face(h: int) -> list[int]:
        orbit, x = [], h
        while True:
            orbit.append(x)
            a = alpha[x]
            x = rot[x if a < 0 else a]
            if x == h:
                return orbit

    def grow():
        h = next((x for x in range(n) if in_comp[x] and alpha[x] < 0), -1)
        if h < 0:
            if remaining[0] == 0:
                yield tuple(alpha)
            return
        s = star[h]
        for h2 in face(h):
            if h2 != h and alpha[h2] < 0 and star[h2] != s:
                alpha[h], alpha[h2] = h2, h
                yield from grow()
                alpha[h] = alpha[h2] = -1
        for d in range(1, len(sizes)):
            if used[d]:
                continue
            attach(d, True)
            remaining[0] -= 1
            for h2 in range(offsets[d], offsets[d] + sizes[d]):
                if star[h2] != s:
                    alpha[h], alpha[h2] = h2, h
                    yield from grow()
                    alpha[h] = alpha[h2] = -1
            remaining[0] += 1
            attach(d, False)

    if n == 0:
        yield ()
        return
    yield from grow()


# -- gluing weights -------------------------------------------------------------

def _tl_choices(contents, offsets, n: int) -> list[tuple[LaurentPoly, list[int]]]:
    """One ``(coefficient, inner matching)`` per choice of diagram on every disk."""
    out = []
    for choice in itertools.product(*contents):
        coef = LaurentPoly.const(1)
        inner = [0] * n
        for off, (c, partner) in zip(offsets, choice):
            coef = coef * c
            for i, j in enumerate(partner):
                inner[off + i] = off + j
        out.append((coef, inner))
    return out


def _integer_contents(contents) -> tuple[int, list]:
    """Scale every disk's coefficients to integers; returns the common divisor."""
    scale, out = 1, []
    for disk in contents:
        den = math.lcm(*(Fraction(c).denominator for c, _ in disk))
        scale *= den
        out.append([(int(Fraction(c) * den), idx) for c, idx in disk])
    return scale, out


def _label_count(alpha, contents, offsets, sizes) -> int:
    n = len(alpha)
    disk_of = [d for d, s in enumerate(sizes) for _ in range(s)]
    labels = [0] * n

    def rec(d: int) -> int:
        if d == len(contents):
            return 1
        off = offsets[d]
        total = 0
        for c, idx in contents[d]:
            ok = True
            for i, lab in enumerate(idx):
                p = alpha[off + i]
                dp = disk_of[p]
                if dp < d and labels[p] != lab:
                    ok = False
                    break
                if dp == d and idx[p - off] != lab:
                    ok = False
                    break
            if not ok:
                continue
            for i, lab in enumerate(idx):
                labels[off + i] = lab
            total += c * rec(d + 1)
        return total

    return rec(0)


def gluing_sum(observable, bodies: Sequence, max_half_edges: int = MAX_HALF_EDGES) -> LaurentPoly:
    """Sum of weights over connected planar gluings of ``observable`` with labeled ``bodies``."""
    mode, q, qpts = _disk_contents(observable)
    contents = [q]
    sizes = [qpts]
    for b in bodies:
        m, c, pts = _disk_contents(b)
        if m != mode:
            raise ValidationError("observable and potential must both be TL or both polynomial")
        contents.append(c)
        sizes.append(pts)
    offsets, o = [], 0
    for s in sizes:
        offsets.append(o)
        o += s
    if mode == "poly":
        scale, ints = _integer_contents(contents)
        count = sum(_label_count(alpha, ints, offsets, sizes)
                    for alpha in planar_gluings(sizes, max_half_edges))
        return LaurentPoly.const(Fraction(count, scale))
    choices = _tl_choices(contents, offsets, o)
    hist: Counter = Counter()
    for alpha in planar_gluings(sizes, max_half_edges):
        for i, (_, inner) in enumerate(choices):
            hist[i, union_cycles(alpha, inner)[1]] += 1
    total = LaurentPoly()
    for (i, loops), count in hist.items():
        total = total + choices[i][0] * LaurentPoly.monomial(loops, count)
    return total


def _box(orders: Sequence[int], max_total: int | None):
    for mi in itertools.product(*(range(o + 1) for o in orders)):
        if max_total is None or sum(mi) <= max_total:
            yield mi


def gibbs_series(Q, potential: Sequence[PotentialTerm], orders: Sequence[int] | int,
                 max_total: int | None = None,
                 max_half_edges: int = MAX_HALF_EDGES) -> TruncatedSeries:
    """Free Gibbs law of ``Q`` for ``V = cup + sum_j beta_j W_j`` as a truncated series.

    ``potential`` lists one :class:`PotentialTerm` per coupling (their
    ``coupling_index`` values give the order of the couplings). ``orders``
    bounds each coupling's power; ``max_total`` optionally bounds the total
    degree.
    """
    terms = sorted(potential, key=lambda t: t.coupling_index)
    if isinstance(orders, int):
        orders = (orders,) * len(terms)
    orders = tuple(orders)
    if len(orders) != len(terms):
        raise ValidationError("one order bound per potential term is required")
    if any(o < 0 for o in orders):
        raise ValidationError("order bounds must be nonnegative")
    _, _, qpts = _disk_contents(Q)
    worst = qpts + sum(o * t.points for o, t in zip(orders, terms))
    if max_total is not None:
        worst = min(worst, qpts + max_total * max((t.points for t in terms), default=0))
    if worst > max_half_edges:
        raise ResourceLimitError(
            f"order bound needs {worst} half-edges, limit is {max_half_edges}", "orders")
    coeffs = {}
    for mi in _box(orders, max_total):
        bodies = [t.body for t, m in zip(terms, mi) for _ in range(m)]
        s = gluing_sum(Q, bodies, max_half_edges)
        factor = Fraction(1)
        for m in mi:
            factor *= Fraction((-1) ** m, math.factorial(m))
        coeffs[mi] = s * factor
    return TruncatedSeries(orders, coeffs, "delta", _describe(Q))


def _describe(Q) -> str:
    if isinstance(Q, TLDiagram):
        return Q.encode()
    if isinstance(Q, TLElement):
        return " + ".join(f"({c})*{d}" for d, c in Q.items())
    return str(Q)


def on_model_series(Q, orders: Sequence[int] = (2, 2), max_total: int | None = None) -> TruncatedSeries:
    """Series for ``V = cup + beta1 cup^2 + beta2 nested-cup`` with symbolic loop parameter."""
    potential = [PotentialTerm(TLElement.of(cupcup()), 0), PotentialTerm(TLElement.of(nested_cup()), 1)]
    s = gibbs_series(Q, potential, tuple(orders), max_total)
    s.couplings = ("beta1", "beta2")
    return s
