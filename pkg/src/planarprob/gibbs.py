"""Langevin sampling of the cut-off Gibbs measures ``1{||A_j|| <= R} exp(-N Tr V(A))``.

Chains run in batches: every letter is an array of shape
``(chains, rows, cols)``. Each chain's time average is one trial.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence

import numpy as np

from .diagrams import as_element, cup
from .ensembles import (EnsembleConfig, EstimateResult, GraphEnsemble, SamplerConfig,
                        rng_streams, sample_gaussian, summarize)
from .errors import ValidationError
from .graphs import GraphElement, tl_to_graph
from .poly import PolyElement, cup_poly
from .words import WordEvaluator, WordSum, complex_gradient, cyclic_gradient, poly_words, trace_sum

log = logging.getLogger(__name__)


@dataclass
class Target:
    """Letters, potential words and observable evaluators for one Gibbs run."""

    letters: tuple[Hashable, ...]
    shapes: dict  # letter -> (rows, cols)
    N: int
    potential: WordSum
    R: float | None
    init: object  # callable (rng, chains) -> dict of letters
    observe: object  # callable (WordEvaluator) -> array (chains, n_obs)
    empty_trace: float = 1.0  # trace of the empty word in the potential

    def energy(self, ev: WordEvaluator) -> np.ndarray:
        return self.N * trace_sum(self.potential, ev, self.empty_trace)

    def batch_shapes(self, chains: int) -> dict:
        return {i: (chains,) + self.shapes[i] for i in self.letters}


def poly_target(cfg: EnsembleConfig, observables: Sequence[PolyElement]) -> Target:
    K = cfg.K
    V = poly_words(cup_poly(K))
    for beta, body in cfg.potential:
        if not isinstance(body, PolyElement):
            raise ValidationError("polynomial Gibbs mode needs polynomial potential terms")
        V += [(beta * c, w) for c, w in poly_words(body)]
    N, Np = cfg.N, cfg.N_prime or cfg.N
    progs = [poly_words(q) for q in observables]

    def init(rng, chains):
        return {i: sample_gaussian(N, Np, rng, chains) for i in range(1, K + 1)}

    def observe(ev):
        return np.stack([trace_sum(p, ev, N) / N for p in progs], axis=-1)

    return Target(tuple(range(1, K + 1)), {i: (N, Np) for i in range(1, K + 1)}, N, V, cfg.R,
                  init, observe, float(N))


def graph_target(cfg: EnsembleConfig, observables: Sequence[GraphElement]) -> Target:
    ens = GraphEnsemble.build(cfg.graph, cfg.N)
    g, pf = ens.graph, ens.pf
    V = tl_to_graph(g, pf, cup())
    for beta, body in cfg.potential:
        if isinstance(body, GraphElement):
            V = V + beta * body
        else:
            V = V + beta * tl_to_graph(g, pf, as_element(body))
    words = ens.words(V)
    progs = [ens.words(q) for q in observables]
    shapes = {e: s[1:] for e, s in ens.shapes().items()}

    def observe(ev):
        return np.stack([ens.estimator(p, ev) for p in progs], axis=-1)

    return Target(tuple(range(len(g.edges))), shapes, cfg.N, words, cfg.R,
                  lambda rng, chains: ens.sample(rng, chains), observe)


def _opnorm_ok(mats: dict, R: float | None) -> np.ndarray:
    """Per chain: every letter has operator norm at most ``R``."""
    chains = next(iter(mats.values())).shape[0]
    ok = np.ones(chains, dtype=bool)
    if R is None:
        return ok
    for a in mats.values():
        aa = a @ np.conj(np.swapaxes(a, -1, -2))
        # the largest absolute row sum of AA* bounds ||A||^2 from above
        bound = np.abs(aa).sum(axis=-1).max(axis=-1)
        unsure = bound > R * R
        if unsure.any():
            top = np.linalg.eigvalsh(aa[unsure])[:, -1]
            ok[np.flatnonzero(unsure)[top > R * R]] = False
    return ok


@dataclass
class ChainState:
    mats: dict
    U: np.ndarray
    G: dict | None


def _evaluate(target: Target, mats: dict, grad, need_grad: bool) -> ChainState:
    ev = WordEvaluator(mats)
    U = target.energy(ev)
    G = None
    if need_grad:
        chains = U.shape[0]
        G = complex_gradient(grad, ev, target.batch_shapes(chains))
        G = {i: target.N * g for i, g in G.items()}
    return ChainState(mats, U, G)


def default_step(target: Target) -> float:
    dims = 2 * sum(r * c for r, c in target.shapes.values())
    return 0.8 / (target.N * dims ** (1 / 3))


def run_chains(target: Target, sc: SamplerConfig, rng: np.random.Generator,
               chains: int) -> Iterator[tuple[int, dict, float]]:
    """Yield ``(sweep, state, acceptance so far)`` after burn-in, every ``thin`` sweeps.

    Metropolis-adjusted Langevin by default, random-walk Metropolis when
    ``sc.method == "rwm"``. Proposals leaving the cutoff ball are rejected.
    """
    h = sc.step or default_step(target)
    mala = sc.method == "mala"
    grad = cyclic_gradient(target.potential) if mala else None
    mats = target.init(rng, chains)
    ok = _opnorm_ok(mats, target.R)
    while not ok.all():  # start inside the cutoff ball
        fresh = target.init(rng, chains)
        mats = {i: np.where(ok[:, None, None], mats[i], fresh[i]) for i in mats}
        ok = _opnorm_ok(mats, target.R)
    state = _evaluate(target, mats, grad, mala)
    accepted = 0
    proposed = 0
    noise = math.sqrt(2 * h)
    total = sc.burn_in + sc.steps
    for sweep in range(total):
        prop = {}
        for i, a in state.mats.items():
            xi = rng.standard_normal(a.shape) + 1j * rng.standard_normal(a.shape)
            drift = h * state.G[i] if mala else 0.0
            prop[i] = a - drift + noise * xi
        inside = _opnorm_ok(prop, target.R)
        new = _evaluate(target, prop, grad, mala)
        log_a = state.U - new.U
        if mala:
            for i in prop:
                fwd = prop[i] - state.mats[i] + h * state.G[i]
                bwd = state.mats[i] - prop[i] + h * new.G[i]
                log_a += (np.sum(np.abs(fwd) ** 2, axis=(-2, -1))
                          - np.sum(np.abs(bwd) ** 2, axis=(-2, -1))) / (4 * h)
        u = rng.random(len(log_a))
        acc = inside & (np.log(u) < log_a)
        sel = acc[:, None, None]
        mats = {i: np.where(sel, prop[i], state.mats[i]) for i in prop}
        U = np.where(acc, new.U, state.U)
        G = {i: np.where(sel, new.G[i], state.G[i]) for i in prop} if mala else None
        state = ChainState(mats, U, G)
        if sweep >= sc.burn_in:
            accepted += int(acc.sum())
            proposed += len(acc)
            if (sweep - sc.burn_in) % sc.thin == 0:
                yield sweep, state.mats, accepted / proposed


def make_target(cfg: EnsembleConfig, observables: Sequence = ()) -> Target:
    if not cfg.mode.startswith("gibbs"):
        raise ValidationError("Gibbs sampling needs a gibbs mode")
    return graph_target(cfg, observables) if cfg.is_graph else poly_target(cfg, observables)


def gibbs_sample(cfg: EnsembleConfig, chains: int | None = None,
                 rng: np.random.Generator | None = None) -> Iterator[dict]:
    """Stream of sampled letter tuples (batched over chains) for the configured measure."""
    target = make_target(cfg)
    rng = rng or rng_streams(cfg.seed, 1)[0]
    for _, mats, _ in run_chains(target, cfg.sampler, rng, chains or cfg.trials):
        yield mats


def estimate_gibbs(observables: Sequence, cfg: EnsembleConfig,
                   names: Sequence[str] | None = None) -> list[EstimateResult]:
    """Time averages over ``cfg.trials`` independent chains, split across worker streams."""
    target = make_target(cfg, observables)
    streams = rng_streams(cfg.seed, cfg.workers)
    parts = [list(range(w, cfg.trials, cfg.workers)) for w in range(cfg.workers)]
    per_chain = np.empty((cfg.trials, len(observables)))
    rates = []
    t0 = time.perf_counter()
    for w, idx in enumerate(parts):
        if not idx:
            continue
        acc_sum = np.zeros((len(idx), len(observables)))
        n = 0
        rate = 0.0
        for _, mats, rate in run_chains(target, cfg.sampler, streams[w], len(idx)):
            acc_sum += target.observe(WordEvaluator(mats))
            n += 1
        per_chain[idx] = acc_sum / n
        rates.append(rate)
    wall = time.perf_counter() - t0
    rate = float(np.mean(rates))
    h = cfg.sampler.step or default_step(target)
    log.info("acceptance rate %.3f at step %.3g", rate, h)
    if not 0.1 <= rate <= 0.9:
        suggestion = h * (rate / 0.6 if rate < 0.1 else 2.0)
        warnings.warn(f"acceptance rate {rate:.3f} outside [0.1, 0.9]; try step {suggestion:.3g}",
                      RuntimeWarning, stacklevel=2)
    names = names or [str(q) for q in observables]
    return [summarize(n, per_chain[:, j], cfg.N, wall, acceptance=rate, step=h)
            for j, n in enumerate(names)]
