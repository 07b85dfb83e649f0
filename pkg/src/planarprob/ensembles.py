"""Gaussian and graph-indexed matrix ensembles with seeded trace estimators."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .graphs import (BipartiteGraph, GraphElement, PFData, block_sizes, compile_element,
                     load_graph, pf_eigen)
from .poly import PolyElement
from .words import WordEvaluator, poly_words, program_words, trace_sum

MODES = ("gaussian-poly", "gaussian-graph", "gibbs-poly", "gibbs-graph")


@dataclass
class SamplerConfig:
    step: float | None = None  # None picks 0.8 / (N * dim**(1/3))
    burn_in: int = 300
    thin: int = 1
    steps: int = 1500
    method: str = "mala"

    def __post_init__(self):
        if self.method not in ("mala", "rwm"):
            raise ValidationError(f"unknown sampler method {self.method!r}")
        if self.steps < 1 or self.burn_in < 0 or self.thin < 1:
            raise ValidationError("sampler needs steps >= 1, burn_in >= 0 and thin >= 1")
        if self.step is not None and not self.step > 0:
            raise ValidationError("step must be positive")


@dataclass
class EnsembleConfig:
    """Everything needed to reproduce one Monte Carlo run.

    ``potential`` is a list of ``(beta, body)`` pairs where ``body`` is a
    :class:`PolyElement` (polynomial modes) or a TL element (graph modes).
    """

    mode: str = "gaussian-poly"
    K: int = 1
    graph: str | BipartiteGraph | None = None
    N: int = 64
    N_prime: int | None = None
    potential: list = field(default_factory=list)
    R: float | None = None
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    trials: int = 200
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.sampler, dict):
            self.sampler = SamplerConfig(**self.sampler)
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {', '.join(MODES)}")
        if self.N < 8:
            raise ValidationError("N must be at least 8")
        if self.N_prime is not None and self.N_prime < 1:
            raise ValidationError("N_prime must be positive")
        if self.K < 1:
            raise ValidationError("K must be at least 1")
        if self.trials < 2:
            raise ValidationError("at least two trials are needed for an error bar")
        if self.workers < 1:
            raise ValidationError("workers must be positive")
        for beta, _ in self.potential:
            if not math.isfinite(beta):
                raise ValidationError("couplings must be finite")
        if self.mode.startswith("gibbs"):
            if self.R is None or not self.R > 2:
                raise ValidationError("Gibbs modes need a cutoff R > 2")
        if self.mode.endswith("graph"):
            if self.graph is None:
                raise ValidationError("graph modes need a graph")
            if not isinstance(self.graph, BipartiteGraph):
                self.graph = load_graph(self.graph)
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must fit in 64 bits")

    @property
    def is_graph(self) -> bool:
        return self.mode.endswith("graph")

    def describe(self) -> dict:
        """JSON-ready summary used for hashing and manifests."""
        d = asdict(self)
        d["graph"] = self.graph.to_dict() if isinstance(self.graph, BipartiteGraph) else self.graph
        d["potential"] = [[b, str(body)] for b, body in self.potential]
        return d


@dataclass
class EstimateResult:
    observable: str
    mean: float
    stderr: float
    trials: int
    N: int
    wall_time: float = field(default=0.0, compare=False)
    extra: dict = field(default_factory=dict, compare=False)

    def within(self, target: float, k: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr + slack


def rng_streams(seed: int, workers: int) -> list[np.random.Generator]:
    """Independent generators derived from ``(seed, worker index)``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(workers)]


def sample_gaussian(N: int, N_prime: int | None, rng: np.random.Generator,
                    batch: int | None = None, variance: float | None = None) -> np.ndarray:
    """Complex Gaussian matrix with centered entries and ``E|a|^2 = 1/N``.

    ``variance`` overrides ``1/N``; ``batch`` prepends a batch axis.
    """
    cols = N if N_prime is None else N_prime
    if N < 1 or cols < 1:
        raise ValidationError("matrix sizes must be positive")
    shape = (N, cols) if batch is None else (batch, N, cols)
    s = math.sqrt((1.0 / N if variance is None else variance) / 2)
    x = rng.standard_normal(shape)
    y = rng.standard_normal(shape)
    return s * (x + 1j * y)


def summarize(name: str, values: Sequence[float], N: int, wall: float, **extra) -> EstimateResult:
    vals = np.asarray(values, dtype=float)
    n = len(vals)
    mean = math.fsum(vals) / n
    var = math.fsum((vals - mean) ** 2) / (n - 1)
    return EstimateResult(name, mean, math.sqrt(var / n), n, N, wall, dict(extra))


def _split(trials: int, workers: int) -> list[list[int]]:
    return [list(range(w, trials, workers)) for w in range(workers)]


def run_trials(trial_fn: Callable[[np.random.Generator, int], np.ndarray], trials: int,
               seed: int, workers: int) -> np.ndarray:
    """``trial_fn(rng, count) -> (count, n_obs)`` run per worker stream; rows in trial order."""
    streams = rng_streams(seed, workers)
    parts = _split(trials, workers)

    def work(w: int):
        return trial_fn(streams[w], len(parts[w]))

    if workers == 1:
        results = [work(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, range(workers)))
    out = None
    for idx, res in zip(parts, results):
        res = np.asarray(res)
        if out is None:
            out = np.empty((trials,) + res.shape[1:])
        out[idx] = res
    return out


# -- polynomial ensembles ----------------------------------------------------------

def estimate_traces_gaussian(Qs: Sequence[PolyElement], cfg: EnsembleConfig,
                             names: Sequence[str] | None = None) -> list[EstimateResult]:
    """``E (1/N) Tr Q`` for each observable, all from the same samples."""
    if cfg.mode != "gaussian-poly":
        raise ValidationError("estimate_trace_gaussian needs mode gaussian-poly")
    K = max([cfg.K] + [q.n_letters for q in Qs])
    if K > cfg.K:
        raise ValidationError(f"observable uses X{K} but the ensemble has K={cfg.K}")
    programs = [poly_words(q) for q in Qs]
    N = cfg.N

    def trial(rng: np.random.Generator, count: int) -> np.ndarray:
        rows = []
        for _ in range(count):
            mats = {i: sample_gaussian(N, cfg.N_prime, rng)[None] for i in range(1, cfg.K + 1)}
            ev = WordEvaluator(mats)
            rows.append([float(trace_sum(words, ev, N)[0]) / N for words in programs])
        return np.array(rows)

    t0 = time.perf_counter()
    data = run_trials(trial, cfg.trials, cfg.seed, cfg.workers)
    wall = time.perf_counter() - t0
    names = names or [str(q) for q in Qs]
    return [summarize(n, data[:, j], N, wall) for j, n in enumerate(names)]


def estimate_trace_gaussian(Q: PolyElement, cfg: EnsembleConfig) -> EstimateResult:
    return estimate_traces_gaussian([Q], cfg)[0]


# -- graph ensembles ------------------------------------------------------------------

@dataclass(frozen=True)
class GraphEnsemble:
    """Block sizes, per-edge variances and estimator normalization for one graph and ``N``."""

    graph: BipartiteGraph
    pf: PFData
    N: int
    sizes: dict
    variances: tuple[float, ...]
    normalization: float

    @classmethod
    def build(cls, g: BipartiteGraph, N: int, pf: PFData | None = None) -> "GraphEnsemble":
        pf = pf or pf_eigen(g)
        sizes = block_sizes(pf, N)
        for v, s in sizes.items():
            if s < 1:
                raise ValidationError(f"vertex {v!r} gets an empty block at N={N}")
        var = []
        for v, w in g.edges:
            c = math.sqrt(pf.mu[v] / pf.mu[w])
            var.append(1.0 / (N * pf.mu[v] * c))
        norm = math.fsum(pf.mu[v] * sizes[v] / N for v in g.even)
        return cls(g, pf, N, sizes, tuple(var), norm)

    def sample(self, rng: np.random.Generator, batch: int = 1) -> dict[int, np.ndarray]:
        mats = {}
        for e, (v, w) in enumerate(self.graph.edges):
            mats[e] = sample_gaussian(self.sizes[v], self.sizes[w], rng, batch, self.variances[e])
        return mats

    def shapes(self, batch: int = 1) -> dict[int, tuple[int, int, int]]:
        return {e: (batch, self.sizes[v], self.sizes[w]) for e, (v, w) in enumerate(self.graph.edges)}

    def words(self, Q: GraphElement):
        return program_words(compile_element(Q, self.N, self.pf, self.graph), self.pf)

    def estimator(self, words, ev: WordEvaluator) -> np.ndarray:
        """``sum_v (mu(v)/N) Tr(Q_v)`` divided by the value on the unit."""
        return trace_sum(words, ev) / self.N / self.normalization


def estimate_traces_graph(Qs: Sequence[GraphElement], cfg: EnsembleConfig,
                          names: Sequence[str] | None = None) -> list[EstimateResult]:
    if cfg.mode != "gaussian-graph":
        raise ValidationError("estimate_trace_graph needs mode gaussian-graph")
    ens = GraphEnsemble.build(cfg.graph, cfg.N)
    programs = [ens.words(q) for q in Qs]

    def trial(rng: np.random.Generator, count: int) -> np.ndarray:
        rows = []
        for _ in range(count):
            ev = WordEvaluator(ens.sample(rng))
            rows.append([float(ens.estimator(w, ev)[0]) for w in programs])
        return np.array(rows)

    t0 = time.perf_counter()
    data = run_trials(trial, cfg.trials, cfg.seed, cfg.workers)
    wall = time.perf_counter() - t0
    names = names or [f"obs{j}" for j in range(len(Qs))]
    return [summarize(n, data[:, j], cfg.N, wall, normalization=ens.normalization)
            for j, n in enumerate(names)]


def estimate_trace_graph(Q: GraphElement, cfg: EnsembleConfig) -> EstimateResult:
    return estimate_traces_graph([Q], cfg)[0]
