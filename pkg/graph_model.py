"""Graph representation, seeded family generators and the ``p cc`` file format.

File format (bit-exact, used by golden tests)::

    p cc <n> <m>
    e <u> <v>        # m lines, u < v, sorted lexicographically
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import networkx as nx
import numpy as np

from errors import GraphIoError, InvalidSpec, ParseError

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Input subgraph G' = (V, E') of the clique over vertices 0..n-1."""

    n: int
    edges: frozenset[Edge]
    known_arboricity_bound: int | None = field(default=None, compare=False)
    _adj: tuple[frozenset[int], ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidSpec("vertex count must be non-negative")
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            if u == v:
                raise InvalidSpec(f"self-loop at {u}")
            if not (0 <= u < v < self.n):
                raise InvalidSpec(f"edge ({u}, {v}) is not normalised or out of range")
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(s) for s in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], known_arboricity_bound: int | None = None) -> "Graph":
        """Build a graph, normalising endpoints; duplicates collapse."""

        return cls(n, frozenset(norm_edge(u, v) for u, v in edges), known_arboricity_bound)

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(s) for s in self._adj), default=0)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def induced_edges(self, vertices: Iterable[int]) -> frozenset[Edge]:
        keep = set(vertices)
        return frozenset(e for e in self.edges if e[0] in keep and e[1] in keep)

    def edge_subgraph(self, edges: Iterable[Edge]) -> "Graph":
        """Spanning subgraph on the same vertex set (subgraphs of a clique stay cliques)."""

        return Graph(self.n, frozenset(edges))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


# ------------------------------
# Generators
# ------------------------------


@dataclass(frozen=True)
class GraphFamilySpec:
    """Family name, its parameters and a 64-bit seed."""

    kind: str
    n: int = 0
    k: int = 1
    rows: int = 0
    cols: int = 0
    d: int = 1
    density: float = 1.0
    seed: int = 0


def _from_networkx(g: nx.Graph, bound: int | None) -> Graph:
    mapping = {node: i for i, node in enumerate(sorted(g.nodes()))}
    return Graph.from_edges(len(mapping), ((mapping[u], mapping[v]) for u, v in g.edges()), bound)


def _forest_union(n: int, k: int, density: float, rng: np.random.Generator) -> Graph:
    edges: set[Edge] = set()
    for _ in range(k):
        order = rng.permutation(n)
        for i in range(1, n):
            # attach to a uniformly random earlier vertex (random recursive tree)
            parent = int(order[int(rng.integers(0, i))])
            e = norm_edge(int(order[i]), parent)
            if density < 1.0 and rng.random() >= density:
                continue
            edges.add(e)
    return Graph(n, frozenset(edges), k)


def _random_degenerate(n: int, d: int, rng: np.random.Generator) -> Graph:
    edges: set[Edge] = set()
    order = rng.permutation(n)
    for i in range(1, n):
        picks = rng.choice(i, size=min(i, d), replace=False)
        for j in picks:
            edges.add(norm_edge(int(order[i]), int(order[int(j)])))
    return Graph(n, frozenset(edges), d)


def generate(spec: GraphFamilySpec) -> Graph:
    """Generate a graph; deterministic in (spec, seed).

    Raises:
        InvalidSpec: unknown family or non-positive parameters.
    """

    kind = spec.kind.replace("-", "_")
    rng = np.random.default_rng(spec.seed & 0xFFFFFFFFFFFFFFFF)

    if kind == "grid":
        if spec.rows <= 0 or spec.cols <= 0:
            raise InvalidSpec("grid needs rows > 0 and cols > 0")
        g = nx.grid_2d_graph(spec.rows, spec.cols)
        bound = 2 if spec.rows > 1 and spec.cols > 1 else 1
        graph = _from_networkx(g, bound)
    elif kind == "cycle":
        if spec.n < 3:
            raise InvalidSpec("cycle needs n >= 3")
        graph = _from_networkx(nx.cycle_graph(spec.n), 2)
    elif kind == "star":
        if spec.n < 1:
            raise InvalidSpec("star needs n >= 1")
        graph = _from_networkx(nx.star_graph(spec.n - 1), 1)
    elif kind == "complete":
        if spec.n < 1:
            raise InvalidSpec("complete needs n >= 1")
        graph = _from_networkx(nx.complete_graph(spec.n), max(1, (spec.n + 1) // 2))
    elif kind == "forest_union":
        if spec.n <= 0 or spec.k <= 0:
            raise InvalidSpec("forest_union needs n > 0 and k > 0")
        if spec.k >= spec.n and spec.n > 1:
            raise InvalidSpec("forest_union needs k < n")
        if not 0.0 < spec.density <= 1.0:
            raise InvalidSpec("density must lie in (0, 1]")
        graph = _forest_union(spec.n, spec.k, spec.density, rng)
    elif kind == "random_degenerate":
        if spec.n <= 0 or spec.d <= 0:
            raise InvalidSpec("random_degenerate needs n > 0 and d > 0")
        graph = _random_degenerate(spec.n, spec.d, rng)
    else:
        raise InvalidSpec(f"unknown graph family: {spec.kind}")

    logger.debug("generated %s: n=%d m=%d", kind, graph.n, graph.m)
    return graph


# ------------------------------
# File format
# ------------------------------


def dumps(graph: Graph) -> str:
    lines = [f"p cc {graph.n} {graph.m}"]
    lines.extend(f"e {u} {v}" for u, v in graph.sorted_edges())
    return "\n".join(lines) + "\n"


def loads(text: str) -> Graph:
    """Parse the ``p cc`` format.

    Raises:
        ParseError: malformed header, bad line, out-of-range ID, self-loop,
            duplicate edge or an edge count that does not match the header.
    """

    header: tuple[int, int] | None = None
    edges: set[Edge] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c "):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cc":
                raise ParseError(f"line {lineno}: expected header 'p cc <n> <m>'")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as e:
                raise ParseError(f"line {lineno}: non-integer header field") from e
            if header[0] < 0 or header[1] < 0:
                raise ParseError(f"line {lineno}: negative header field")
            continue
        if len(parts) != 3 or parts[0] != "e":
            raise ParseError(f"line {lineno}: expected 'e <u> <v>'")
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError as e:
            raise ParseError(f"line {lineno}: non-integer vertex ID") from e
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {lineno}: vertex ID out of range [0, {n})")
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at {u}")
        e = norm_edge(u, v)
        if e in edges:
            raise ParseError(f"line {lineno}: duplicate edge {e}")
        edges.add(e)

    if header is None:
        raise ParseError("missing header 'p cc <n> <m>'")
    if len(edges) != header[1]:
        raise ParseError(f"header announces {header[1]} edges, found {len(edges)}")
    return Graph(header[0], frozenset(edges))


def save(graph: Graph, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps(graph), encoding="utf-8")
    except OSError as e:
        raise GraphIoError(f"cannot write {path}: {e}") from e


def load(path: str | Path) -> Graph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise GraphIoError(f"cannot read {path}: {e}") from e
    return loads(text)
