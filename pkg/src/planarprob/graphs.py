"""Bipartite graphs, Perron-Frobenius data and the loop basis of the graph planar algebra.

Edges always run from an even vertex to an odd vertex (the positive
orientation). A closed path based at an even vertex alternates
``X_e`` (even to odd) and ``X_e*`` (odd to even), so its matrix word is an
alternating word exactly as in the polynomial algebra.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np

from .diagrams import TLDiagram, as_element
from .errors import ResourceLimitError, ValidationError

MAX_LOOP_LENGTH = 8  # in units of k (paths of length 2k)
_DENSE_LIMIT = 64


@dataclass(frozen=True)
class BipartiteGraph:
    even: tuple[str, ...]
    odd: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "even", tuple(self.even))
        object.__setattr__(self, "odd", tuple(self.odd))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        ev, od = set(self.even), set(self.odd)
        if len(ev) != len(self.even) or len(od) != len(self.odd) or ev & od:
            raise ValidationError("vertex names must be unique across both classes")
        if not self.edges:
            raise ValidationError("graph needs at least one edge")
        for a, b in self.edges:
            if a not in ev or b not in od:
                raise ValidationError(f"edge ({a}, {b}) must join an even vertex to an odd vertex")
        if not self.is_connected():
            raise ValidationError(f"graph {self.name!r} is not connected")

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.even + self.odd

    def is_even(self, v: str) -> bool:
        return v in self.even

    def is_connected(self) -> bool:
        verts = self.vertices
        adj = {v: set() for v in verts}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen, stack = {verts[0]}, [verts[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(verts)

    def adjacency(self) -> np.ndarray:
        """Symmetric adjacency matrix (edge multiplicities) in ``vertices`` order."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        A = np.zeros((len(idx), len(idx)))
        for a, b in self.edges:
            A[idx[a], idx[b]] += 1
            A[idx[b], idx[a]] += 1
        return A

    def incident(self, v: str) -> list[int]:
        return [i for i, (a, b) in enumerate(self.edges) if v in (a, b)]

    def other_end(self, e: int, v: str) -> str:
        a, b = self.edges[e]
        return b if v == a else a

    @classmethod
    def from_dict(cls, data: Mapping) -> "BipartiteGraph":
        try:
            return cls(tuple(data["even"]), tuple(data["odd"]),
                       tuple(tuple(e) for e in data["edges"]), data.get("name", ""))
        except KeyError as exc:
            raise ValidationError(f"graph JSON is missing {exc.args[0]!r}") from None

    def to_dict(self) -> dict:
        return {"name": self.name, "even": list(self.even), "odd": list(self.odd),
                "edges": [list(e) for e in self.edges]}


BUNDLED = ("single_edge", "a3", "a4", "k1k", "bond2")


def load_graph(ref: str | Path) -> BipartiteGraph:
    """Load a bundled graph by name (``"a3"``) or a JSON file by path."""
    p = Path(ref)
    if p.suffix == ".json" and p.exists():
        data = json.loads(p.read_text())
    else:
        name = str(ref).removesuffix(".json")
        try:
            data = json.loads(resources.files(__package__).joinpath("data").joinpath(f"{name}.json").read_text())
        except FileNotFoundError:
            raise ValidationError(f"unknown graph {ref!r}") from None
    data.setdefault("name", p.stem)
    return BipartiteGraph.from_dict(data)


def bond_graph(K: int) -> BipartiteGraph:
    """Two vertices joined by ``K`` parallel edges; its ensemble is the ``K``-letter model."""
    return BipartiteGraph(("v",), ("w",), tuple(("v", "w") for _ in range(K)), f"bond{K}")


def star_graph(K: int) -> BipartiteGraph:
    """``K_{1,K}`` with the hub as the even vertex."""
    leaves = tuple(f"l{i + 1}" for i in range(K))
    return BipartiteGraph(("hub",), leaves, tuple(("hub", l) for l in leaves), f"k1_{K}")


# -- Perron-Frobenius ---------------------------------------------------------

@dataclass(frozen=True)
class PFData:
    delta: float
    mu: dict[str, float]
    residual: float


def pf_eigen(g: BipartiteGraph, tol: float = 1e-12) -> PFData:
    """Graph norm and Perron-Frobenius vector, normalized so ``min(mu) == 1``."""
    A = g.adjacency()
    n = len(A)
    if n <= _DENSE_LIMIT:
        w, V = np.linalg.eigh(A)
        delta, v = w[-1], np.abs(V[:, -1])
    else:
        # shift by the identity so the -delta eigenvalue of a bipartite graph does not compete
        v = np.ones(n) / math.sqrt(n)
        delta = 0.0
        for _ in range(100_000):
            nv = A @ v + v
            nv /= np.linalg.norm(nv)
            delta = float(nv @ A @ nv)
            if np.max(np.abs(A @ nv - delta * nv)) < tol * 1e-2 * max(1.0, delta):
                v = nv
                break
            v = nv
    v = v / v.min()
    residual = float(np.max(np.abs(A @ v - delta * v)))
    if residual >= tol * max(1.0, float(v.max())):
        raise ValidationError(f"Perron-Frobenius residual {residual:.2e} above tolerance")
    return PFData(float(delta), {x: float(m) for x, m in zip(g.vertices, v)}, residual)


# -- loops and elements -------------------------------------------------------

@dataclass(frozen=True)
class GraphLoop:
    """Closed path from ``base``: ``steps`` are ``(edge index, forward)`` pairs.

    ``forward`` means the edge is traversed from its even end to its odd end.
    """

    base: str
    steps: tuple[tuple[int, bool], ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    def vertices(self, g: BipartiteGraph) -> list[str]:
        path = [self.base]
        for e, fwd in self.steps:
            a, b = g.edges[e]
            here = path[-1]
            if (a, b)[0 if fwd else 1] != here:
                raise ValidationError(f"step on edge {e} does not start at {here}")
            path.append(b if fwd else a)
        if path[-1] != self.base:
            raise ValidationError("path does not return to its base")
        return path

    def __mul__(self, other: "GraphLoop") -> "GraphLoop":
        if other.base != self.base:
            raise ValidationError("loops with different bases do not compose")
        return GraphLoop(self.base, self.steps + other.steps)

    def word(self) -> tuple[tuple[int, bool], ...]:
        """Letters ``(edge, starred)``."""
        return tuple((e, not fwd) for e, fwd in self.steps)


class GraphElement:
    """Real linear combination of closed paths."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[GraphLoop, float] | None = None):
        self._terms = {l: float(c) for l, c in (terms or {}).items() if c != 0}

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (kv[0].base, kv[0].steps))

    def __len__(self):
        return len(self._terms)

    @property
    def bases(self) -> set[str]:
        return {l.base for l in self._terms}

    def restrict(self, v: str) -> "GraphElement":
        return GraphElement({l: c for l, c in self._terms.items() if l.base == v})

    def __add__(self, other: "GraphElement") -> "GraphElement":
        terms = dict(self._terms)
        for l, c in other._terms.items():
            terms[l] = terms.get(l, 0.0) + c
        return GraphElement(terms)

    def __rmul__(self, c: float) -> "GraphElement":
        return GraphElement({l: c * v for l, v in self._terms.items()})

    def __mul__(self, other):
        """Concatenation of paths at a common base (the plain product); zero across bases."""
        if not isinstance(other, GraphElement):
            return other * self
        terms: dict[GraphLoop, float] = {}
        for la, ca in self._terms.items():
            for lb, cb in other._terms.items():
                if la.base == lb.base:
                    l = la * lb
                    terms[l] = terms.get(l, 0.0) + ca * cb
        return GraphElement(terms)

    def __pow__(self, p: int) -> "GraphElement":
        if p < 1:
            raise ValidationError("powers start at 1")
        out = self
        for _ in range(p - 1):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, GraphElement):
            return NotImplemented
        return self._terms == other._terms


def enumerate_loops(g: BipartiteGraph, k: int, base: str, max_k: int = MAX_LOOP_LENGTH) -> list[GraphLoop]:
    """Closed paths of length ``2k`` from ``base``, depth first in edge order."""
    if base not in g.vertices:
        raise ValidationError(f"unknown vertex {base!r}")
    if k > max_k:
        raise ResourceLimitError(f"path length 2*{k} exceeds limit 2*{max_k}", "k")
    out: list[GraphLoop] = []
    inc = {v: g.incident(v) for v in g.vertices}

    def dfs(v: str, steps: list):
        if len(steps) == 2 * k:
            if v == base:
                out.append(GraphLoop(base, tuple(steps)))
            return
        for e in inc[v]:
            steps.append((e, g.is_even(v)))
            dfs(g.other_end(e, v), steps)
            steps.pop()

    dfs(base, [])
    return out


def cup_element(g: BipartiteGraph, pf: PFData) -> GraphElement:
    """``sum_e sqrt(mu(v)/mu(w)) X_e X_e*`` over positively oriented edges ``v -> w``."""
    terms = {}
    for e, (v, w) in enumerate(g.edges):
        terms[GraphLoop(v, ((e, True), (e, False)))] = math.sqrt(pf.mu[v] / pf.mu[w])
    return GraphElement(terms)


def tl_to_graph(g: BipartiteGraph, pf: PFData, x) -> GraphElement:
    """Image of a TL element based at even vertices.

    Boundary regions carry vertices and a strand labels both its endpoints
    with one edge. A strand whose outer region is even contributes
    ``sqrt(mu(out)/mu(in))``, as in :func:`cup_element`; one whose outer
    region is odd contributes ``(mu(in)/mu(out))**1.5``. Coefficients must be
    constants.
    """
    out = GraphElement()
    for d, c in as_element(x).items():
        if not (c.is_polynomial() and (c.max_degree or 0) == 0):
            raise ValidationError("graph images need numeric coefficients")
        out = out + float(c.coefficient(0)) * _diagram_to_graph(g, pf, d)
    return out


def _strand_weight(g: BipartiteGraph, pf: PFData, outside: str, inside: str) -> float:
    # matches the edge variances of the graph ensemble, so every cup traces to delta
    r = pf.mu[outside] / pf.mu[inside]
    return math.sqrt(r) if g.is_even(outside) else r ** -1.5


def _diagram_to_graph(g: BipartiteGraph, pf: PFData, d: TLDiagram) -> GraphElement:
    n = 2 * d.k
    terms: dict[GraphLoop, float] = {}
    inc = {v: g.incident(v) for v in g.vertices}
    for base in g.even:
        if n == 0:
            terms[GraphLoop(base, ())] = 1.0
            continue

        def dfs(i: int, verts: list[str], edges: list[int]):
            if i == n:
                if verts[-1] == base:
                    w = 1.0
                    for a in range(n):
                        if a < d.partner[a]:
                            w *= _strand_weight(g, pf, verts[a], verts[a + 1])
                    steps = tuple((e, a % 2 == 0) for a, e in enumerate(edges))
                    terms[GraphLoop(base, steps)] = w
                return
            v = verts[-1]
            j = d.partner[i]
            choices = [edges[j]] if j < i else inc[v]
            for e in choices:
                if v not in g.edges[e]:
                    continue
                nxt = g.other_end(e, v)
                if j < i and nxt != verts[j]:
                    continue
                edges.append(e)
                verts.append(nxt)
                dfs(i + 1, verts, edges)
                edges.pop()
                verts.pop()

        dfs(0, [base], [])
    return GraphElement(terms)


# -- compilation to matrix words --------------------------------------------------

@dataclass(frozen=True)
class MatrixWordProgram:
    """Weighted matrix words with the block size of every vertex.

    ``terms`` holds ``(coefficient, base vertex, word)`` where a word is a
    tuple of ``(edge, starred)`` letters.
    """

    terms: tuple[tuple[float, str, tuple[tuple[int, bool], ...]], ...]
    sizes: dict[str, int] = field(default_factory=dict)
    edge_shapes: tuple[tuple[int, int], ...] = ()

    def __len__(self):
        return len(self.terms)


def block_sizes(pf: PFData, N: int) -> dict[str, int]:
    # the tiny relative slack keeps exact products such as 10 * 1.0 from rounding down
    return {v: int(math.floor(N * m * (1 + 1e-12))) for v, m in pf.mu.items()}


def compile_element(e: GraphElement, N: int, pf: PFData, g: BipartiteGraph) -> MatrixWordProgram:
    """Turn a graph element into matrix words with blocks of size ``[N mu(v)]``."""
    if N < 1:
        raise ValidationError("N must be positive")
    sizes = block_sizes(pf, N)
    for v, s in sizes.items():
        if s < 1:
            raise ValidationError(f"vertex {v!r} gets an empty block at N={N}")
    shapes = tuple((sizes[a], sizes[b]) for a, b in g.edges)
    terms = []
    for loop, c in e.items():
        path = loop.vertices(g)
        rows = sizes[path[0]]
        for (edge, star), here, there in zip(loop.word(), path, path[1:]):
            r, col = shapes[edge][::-1] if star else shapes[edge]
            if r != rows or sizes[here] != r or sizes[there] != col:
                raise ValidationError(f"dimension mismatch on edge {edge}")
            rows = col
        terms.append((c, loop.base, loop.word()))
    return MatrixWordProgram(tuple(terms), sizes, shapes)


compile = compile_element  # noqa: A001
