"""Batched evaluation of matrix words and their cyclic derivatives.

A word is a tuple of letters ``(id, starred)``. Matrices are stored per id
as arrays of shape ``(chains, rows, cols)``; a starred letter uses the
conjugate transpose. Polynomial words use letter indices ``1..K``, graph
words use edge indices.
"""

from __future__ import annotations

from typing import Hashable, Mapping, Sequence

import numpy as np

from .graphs import MatrixWordProgram, PFData
from .poly import PolyElement

Letter = tuple[Hashable, bool]
Word = tuple[Letter, ...]
WordSum = list[tuple[float, Word]]


def poly_words(p: PolyElement) -> WordSum:
    return [(float(c), m.letters) for m, c in p.items()]


def program_words(prog: MatrixWordProgram, pf: PFData) -> WordSum:
    """Graph words weighted by ``mu(base)``, as they enter ``sum_v mu(v) Tr(Q_v)``.

    An empty word already carries the trace of its identity block.
    """
    return [(c * pf.mu[base] * (1 if word else prog.sizes[base]), word)
            for c, base, word in prog.terms]


class WordEvaluator:
    """Products of letters for one batch of matrices, sharing common prefixes."""

    def __init__(self, mats: Mapping[Hashable, np.ndarray]):
        self.mats = mats
        self._adj: dict[Hashable, np.ndarray] = {}
        self._cache: dict[Word, np.ndarray] = {}

    def letter(self, l: Letter) -> np.ndarray:
        i, star = l
        if not star:
            return self.mats[i]
        a = self._adj.get(i)
        if a is None:
            a = self._adj[i] = np.conj(np.swapaxes(self.mats[i], -1, -2))
        return a

    def product(self, w: Word) -> np.ndarray:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        if len(w) == 1:
            out = self.letter(w[0])
        else:
            out = self.product(w[:-1]) @ self.letter(w[-1])
        self._cache[w] = out
        return out

    def trace(self, w: Word) -> np.ndarray:
        """``Re Tr`` of the word for every chain; the last product is never formed."""
        if not w:
            raise ValueError("empty word has no fixed size here")
        if len(w) == 1:
            return np.real(np.trace(self.letter(w[0]), axis1=-2, axis2=-1))
        head, last = self.product(w[:-1]), self.letter(w[-1])
        # Tr(H L) = sum_ij H_ij L_ji
        return np.real(np.einsum("cij,cji->c", head, last))


def trace_sum(words: WordSum, ev: WordEvaluator, empty: float = 1.0) -> np.ndarray:
    """``sum c Re Tr(w)`` per chain; ``empty`` is the trace assigned to the empty word."""
    chains = next(iter(ev.mats.values())).shape[0]
    total = np.zeros(chains)
    for c, w in words:
        total = total + (c * ev.trace(w) if w else c * empty)
    return total


def cyclic_gradient(words: WordSum) -> dict[Hashable, list[tuple[float, Word, bool]]]:
    """Per letter id, the rotated words ``(coef, R, starred)`` of every occurrence.

    For an unstarred occurrence ``d/dt Tr(w(A + tE)) = Tr(E R)``; for a
    starred one the term is ``Tr(E* R)``. ``R`` is the word read cyclically
    after the occurrence.
    """
    out: dict[Hashable, list[tuple[float, Word, bool]]] = {}
    for c, w in words:
        for p, (i, star) in enumerate(w):
            rot = w[p + 1:] + w[:p]
            out.setdefault(i, []).append((c, rot, star))
    return out


def complex_gradient(grad, ev: WordEvaluator, shapes: Mapping[Hashable, tuple[int, ...]]) -> dict[Hashable, np.ndarray]:
    """``dRe/dx + i dRe/dy`` of ``sum c Re Tr(w)`` with respect to every letter.

    An unstarred occurrence contributes ``R*``, a starred one ``R``.
    """
    out = {}
    for i, terms in grad.items():
        g = np.zeros(shapes[i], dtype=complex)
        for c, rot, star in terms:
            r = ev.product(rot)
            g += c * (r if star else np.conj(np.swapaxes(r, -1, -2)))
        out[i] = g
    return out
