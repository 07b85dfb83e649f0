"""All-genus Gaussian expectations of trace words by exhaustive Wick pairing.

Entries of each ``A_i`` are independent complex Gaussians with
``E|a|^2 = 1/N``. A pairing of every ``X_i`` letter with an ``X_i*`` letter
contributes ``N**(F - E)`` where ``E`` is the number of pairs and ``F`` the
number of index loops, i.e. cycles of ``next o pairing`` on letter positions.
No planarity filter is applied: this is the finite-``N`` oracle that the
planar enumerator is checked against.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .maps import MAX_HALF_EDGES, PotentialTerm, TruncatedSeries, _box
from .poly import AltMonomial, PolyElement
from .scalars import LaurentPoly


@lru_cache(maxsize=None)
def _perms(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.int8).reshape(-1, k)


def _face_histogram(words: Sequence[tuple[int, ...]]) -> dict[int, int]:
    """``{F: number of pairings}`` for a product of traces of the given words."""
    nxt, labels = [], []
    off = 0
    for w in words:
        n = len(w)
        nxt.extend(off + (i + 1) % n for i in range(n))
        labels.extend(w)
        off += n
    n = off
    if n == 0:
        return {0: 1}
    groups = {}
    for pos, lab in enumerate(labels):
        u, s = groups.setdefault(lab, ([], []))
        (s if pos % 2 else u).append(pos)  # within each word, odd positions are starred
    # parity is per word; every word has even length so the global index keeps it
    for u, s in groups.values():
        if len(u) != len(s):
            return {}
    sizes = [len(u) for u, _ in groups.values()]
    total = math.prod(math.factorial(k) for k in sizes)
    if total > 5_000_000:
        raise ResourceLimitError(f"{total} pairings exceed the oracle limit", "orders")
    alpha = np.zeros((total, n), dtype=np.int16)
    reps = total
    tile = 1
    for u, s in groups.values():
        P = _perms(len(u))
        reps //= len(P)
        block = np.repeat(np.tile(P, (tile, 1)), reps, axis=0)
        tile *= len(P)
        s_arr = np.array(s)
        for i, up in enumerate(u):
            partner = s_arr[block[:, i]]
            alpha[:, up] = partner
            alpha[np.arange(total), partner] = up
    phi = np.asarray(nxt, dtype=np.int16)[alpha]
    # count cycles by propagating the minimum label along phi
    lab = np.broadcast_to(np.arange(n, dtype=np.int16), (total, n)).copy()
    rows = np.arange(total)[:, None]
    for _ in range(max(1, n.bit_length() + 1)):
        lab = np.minimum(lab, lab[rows, phi])
        phi = phi[rows, phi]
    faces = (lab == np.arange(n)).sum(axis=1)
    vals, counts = np.unique(faces, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def gaussian_expectation(traces: Sequence[PolyElement]) -> LaurentPoly:
    """``E[prod_t Tr(Q_t)]`` as a Laurent polynomial in ``N`` (unnormalized traces)."""
    total = LaurentPoly(var="N")
    choices = [t.items() for t in traces]
    for combo in itertools.product(*choices):
        coef = Fraction(1)
        words = []
        for m, c in combo:
            coef *= c
            words.append(m.indices)
        e = sum(len(w) for w in words) // 2
        hist = _face_histogram(words)
        if hist:
            term = LaurentPoly({f - e: cnt for f, cnt in hist.items()}, var="N")
            total = total + term * coef
    return total


def normalized_moment(Q: PolyElement | AltMonomial) -> LaurentPoly:
    """``E[(1/N) Tr Q]`` at all ``N``."""
    if isinstance(Q, AltMonomial):
        Q = PolyElement.of(Q)
    return gaussian_expectation([Q]) * LaurentPoly.monomial(-1, var="N")


def wick_oracle(Q: PolyElement, potential: Sequence[PotentialTerm], orders: Sequence[int] | int,
                max_total: int | None = None,
                max_half_edges: int = MAX_HALF_EDGES) -> TruncatedSeries:
    """Finite-``N`` jet of ``E_V[(1/N) Tr Q]`` for ``V = XX* + sum_j beta_j W_j``.

    Numerator and partition function are expanded separately in the
    couplings and divided as power series.
    """
    if isinstance(Q, AltMonomial):
        Q = PolyElement.of(Q)
    terms = sorted(potential, key=lambda t: t.coupling_index)
    for t in terms:
        if not isinstance(t.body, PolyElement):
            raise ValidationError("the oracle needs polynomial potential terms")
    if isinstance(orders, int):
        orders = (orders,) * len(terms)
    orders = tuple(orders)
    if len(orders) != len(terms):
        raise ValidationError("one order bound per potential term is required")
    qdeg = max(Q.degrees, default=0)
    worst = qdeg + sum(o * t.points for o, t in zip(orders, terms))
    if worst > max_half_edges:
        raise ResourceLimitError(
            f"order bound needs {worst} half-edges, limit is {max_half_edges}", "orders")

    box = list(_box(orders, max_total))
    inv_n = LaurentPoly.monomial(-1, var="N")
    num, Z = {}, {}
    for mi in box:
        bodies = [t.body for t, m in zip(terms, mi) for _ in range(m)]
        factor = LaurentPoly({0: 1}, var="N")
        for m in mi:
            factor = factor * LaurentPoly({m: Fraction((-1) ** m, math.factorial(m))}, var="N")
        num[mi] = gaussian_expectation([Q] + bodies) * factor * inv_n
        Z[mi] = gaussian_expectation(bodies) * factor

    tau: dict[tuple[int, ...], LaurentPoly] = {}
    for mi in sorted(box, key=sum):
        acc = num[mi]
        for sub in box:
            if sub != mi and all(a <= b for a, b in zip(sub, mi)):
                rest = tuple(b - a for a, b in zip(sub, mi))
                if any(rest) and rest in Z:
                    acc = acc - Z[rest] * tau[sub]
        tau[mi] = acc
    return TruncatedSeries(orders, tau, "oracle", str(Q))
