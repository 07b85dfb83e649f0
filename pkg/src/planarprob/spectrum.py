"""Pooled eigenvalue histograms of self-adjoint matrix polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensembles import EnsembleConfig, run_trials, sample_gaussian
from .errors import ValidationError
from .poly import PolyElement
from .words import WordEvaluator, poly_words


@dataclass
class SpectralHistogram:
    edges: np.ndarray
    density: np.ndarray
    expression: str
    moments: dict[int, float] = field(default_factory=dict)
    eigenvalues: np.ndarray | None = field(default=None, repr=False)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.density * np.diff(self.edges)))

    def mass_above(self, x: float) -> float:
        ev = self.eigenvalues
        return float(np.mean(ev > x))

    def rows(self):
        for lo, hi, d in zip(self.edges[:-1], self.edges[1:], self.density):
            yield float(lo), float(hi), float(d)


def marchenko_pastur_moment(p: int, ratio: float = 1.0) -> float:
    """Moments of the free Poisson law: Narayana polynomials in ``ratio``."""
    return sum(math.comb(p, k) * math.comb(p, k - 1) / p * ratio ** k for k in range(1, p + 1))


def spectral_histogram(expr: PolyElement, cfg: EnsembleConfig, bins: int = 80,
                       n_moments: int = 3) -> SpectralHistogram:
    """Eigenvalues of ``expr(A)`` pooled over ``cfg.trials`` Gaussian samples."""
    if not expr.is_self_adjoint():
        raise ValidationError(f"{expr} is not self-adjoint")
    if cfg.K < expr.n_letters:
        raise ValidationError(f"expression uses X{expr.n_letters} but K={cfg.K}")
    words = poly_words(expr)
    N = cfg.N

    def trial(rng, count):
        out = []
        for _ in range(count):
            mats = {i: sample_gaussian(N, cfg.N_prime, rng)[None] for i in range(1, cfg.K + 1)}
            ev = WordEvaluator(mats)
            M = sum(c * (ev.product(w)[0] if w else np.eye(N)) for c, w in words)
            out.append(np.linalg.eigvalsh((M + M.conj().T) / 2))
        return np.array(out)

    ev = run_trials(trial, cfg.trials, cfg.seed, cfg.workers).ravel()
    density, edges = np.histogram(ev, bins=bins, range=(min(0.0, ev.min()), ev.max()), density=True)
    moments = {p: math.fsum(ev ** p) / len(ev) for p in range(1, n_moments + 1)}
    return SpectralHistogram(edges, density, str(expr), moments, ev)
