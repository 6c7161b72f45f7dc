"""H-partitions, forest decompositions and the universal O(a)-round solver.

Everything here runs on :class:`sim_engine.CliqueNetwork`; the round counts
are exact closed forms:

* peeling phase: ``peeling_iterations(a, eps)`` rounds;
* Sparse-Partition: 1 degree round, then (if the residual has m_r > 0 edges)
  one Lenzen call to spread edges over relays and ``ceil(m_r / n)`` relay
  broadcast rounds;
* orientation and labelling: local, 0 rounds;
* learn_graph: exactly the label bound, one parent per round.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence

import config
from errors import InvalidParameters, SparsePreconditionFailed
from graph_model import Edge, Graph, norm_edge
from sim_engine import Board, CliqueNetwork, Inbox, Protocol, VertexProcess

logger = logging.getLogger(__name__)


# ------------------------------
# Types
# ------------------------------


@dataclass(frozen=True)
class KnownGraph:
    """A vertex's local copy of (part of) G'. Copies at different vertices compare equal."""

    n: int
    edges: frozenset[Edge]
    vertices: frozenset[int] = field(default=frozenset())

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges)

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return adj


@dataclass(frozen=True)
class HPartition:
    """Level of every vertex (levels start at 1) and the degree bound it witnesses."""

    level: Mapping[int, int]
    degree_bound: int

    @property
    def ell(self) -> int:
        return max(self.level.values(), default=0)


@dataclass
class HPartitionResult:
    partition: HPartition
    learned_suffix: KnownGraph
    suffix_start: int
    peeling_rounds: int
    sparse_rounds: int
    residual_edges: int

    @property
    def rounds(self) -> int:
        return self.peeling_rounds + self.sparse_rounds


@dataclass
class ForestLabeling:
    """Total acyclic orientation plus a forest label per edge.

    ``head[e]`` is the endpoint edge ``e`` points to (the parent of the other
    endpoint in forest ``label[e]``).
    """

    head: dict[Edge, int]
    label: dict[Edge, int]
    num_labels: int
    h: HPartitionResult | None = None

    def parents(self, v: int, graph: Graph) -> list[tuple[int, int]]:
        """(parent, label) pairs of v, ordered by label."""

        out = [(u, self.label[norm_edge(u, v)]) for u in graph.neighbors(v) if self.head[norm_edge(u, v)] == u]
        return sorted(out, key=lambda x: x[1])

    def children(self, v: int, graph: Graph) -> list[int]:
        return sorted(u for u in graph.neighbors(v) if self.head[norm_edge(u, v)] == v)


# ------------------------------
# Closed forms
# ------------------------------


def degree_threshold(a: float, eps: float, q: float | None = None) -> int:
    """Largest active degree allowed to join an H-set: floor((2+eps)a), or floor((2+q)a)."""

    return int(math.floor((2.0 + (eps if q is None else q)) * a + 1e-9))


def peeling_iterations(a: float, eps: float, q: float | None = None) -> int:
    """ceil((2/eps) log2 a); with the second parameter q, ceil(1/eps) + 1."""

    if eps <= 0:
        raise InvalidParameters("eps must be positive")
    if q is not None:
        return math.ceil(1.0 / eps - 1e-9) + 1
    if a <= 1:
        return 0
    return math.ceil((2.0 / eps) * math.log2(a) - 1e-9)


def sparse_rounds(n: int, residual_edges: int, lenzen_charge: int) -> int:
    if residual_edges == 0:
        return 1
    return 1 + lenzen_charge + math.ceil(residual_edges / n)


# ------------------------------
# Shared local computations
# ------------------------------


@lru_cache(maxsize=256)
def _union_parts(n: int, vertices: frozenset[int], parts: tuple[frozenset[Edge], ...]) -> KnownGraph:
    edges: set[Edge] = set()
    for part in parts:
        edges.update(part)
    return KnownGraph(n, frozenset(edges), vertices)


def _board_edges(board: Board) -> frozenset[Edge]:
    return board.cached("edges", lambda: frozenset(norm_edge(p[0], p[1]) for _, p in board))


@lru_cache(maxsize=256)
def greedy_h_partition(known: KnownGraph, start_index: int, threshold: int) -> tuple[tuple[int, int], ...]:
    """Synchronous peeling of a known graph, levels from ``start_index``.

    Raises:
        SparsePreconditionFailed: no vertex can be peeled (arboricity promise too small).
    """

    adj = known.adjacency()
    deg = {v: len(adj[v]) for v in adj}
    active = set(adj)
    levels: list[tuple[int, int]] = []
    i = start_index
    while active:
        joined = sorted(v for v in active if deg[v] <= threshold)
        if not joined:
            raise SparsePreconditionFailed(
                f"{len(active)} residual vertices all have more than {threshold} active neighbors"
            )
        for v in joined:
            levels.append((v, i))
        active.difference_update(joined)
        for v in joined:
            for u in adj[v]:
                if u in active:
                    deg[u] -= 1
        i += 1
    return tuple(sorted(levels))


# ------------------------------
# Protocols
# ------------------------------


@dataclass(frozen=True)
class PeelingOutput:
    level: int | None
    residual_neighbors: frozenset[int]


class PeelingProtocol(Protocol):
    """Distributed peeling: active vertices with few active neighbors join H_i."""

    name = "h-partition-peeling"

    def __init__(self, iterations: int, threshold: int) -> None:
        self.iterations = iterations
        self.threshold = threshold

    def init(self, vertex: VertexProcess) -> None:
        vertex.state.update(active=True, active_nbrs=set(vertex.neighbors), level=None)

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        st = vertex.state
        for src, _ in inbox:
            st["active_nbrs"].discard(src)

        if vertex.round > self.iterations:
            residual = frozenset(st["active_nbrs"]) if st["active"] else frozenset()
            vertex.halt(PeelingOutput(st["level"], residual))
            return

        if st["active"] and len(st["active_nbrs"]) <= self.threshold:
            st["active"] = False
            st["level"] = vertex.round
            for u in sorted(st["active_nbrs"]):
                vertex.send(u, (vertex.round,))


@dataclass(frozen=True)
class SparseOutput:
    levels: tuple[tuple[int, int], ...]
    known: KnownGraph


class SparsePartitionProtocol(Protocol):
    """Every vertex learns the residual graph, then peels it locally."""

    name = "sparse-partition"

    def __init__(
        self,
        residual: Mapping[int, frozenset[int] | None],
        start_index: int,
        threshold: int,
        c_sparse: int = config.C_SPARSE,
    ) -> None:
        # residual[v] is None for vertices peeled earlier
        self.residual = residual
        self.start_index = start_index
        self.threshold = threshold
        self.c_sparse = c_sparse

    def _finish(self, vertex: VertexProcess, known: KnownGraph) -> None:
        levels = greedy_h_partition(known, self.start_index, self.threshold)
        vertex.halt(SparseOutput(levels, known))

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        st = vertex.state
        n = vertex.n
        r = vertex.round

        if r == 1:
            nbrs = self.residual.get(vertex.id)
            active = nbrs is not None
            st["owned"] = sorted(u for u in (nbrs or ()) if u > vertex.id)
            vertex.broadcast((int(active), len(st["owned"])))
            return

        if r == 2:
            board = inbox.board
            vertices, offsets, m = board.cached("degrees", lambda: _degree_table(board, n))
            if m > self.c_sparse * n:
                raise SparsePreconditionFailed(
                    f"residual graph has {m} edges > {self.c_sparse}·n = {self.c_sparse * n}"
                )
            st["vertices"] = vertices
            st["batches"] = math.ceil(m / n)
            st["parts"] = ()
            if m == 0:
                self._finish(vertex, _union_parts(n, vertices, ()))
                return
            base = offsets[vertex.id]
            for j, u in enumerate(st["owned"]):
                vertex.lenzen_send((base + j) % n, (vertex.id, u))
            return

        if r == 3:
            st["held"] = sorted(m.payload for m in inbox.messages)
        else:
            st["parts"] = st["parts"] + (_board_edges(inbox.board),)

        b = r - 3
        if b < st["batches"]:
            if b < len(st["held"]):
                vertex.broadcast(st["held"][b])
            return
        self._finish(vertex, _union_parts(n, st["vertices"], st["parts"]))


def _degree_table(board: Board, n: int) -> tuple[frozenset[int], dict[int, int], int]:
    vertices = frozenset(src for src, p in board if p[0] == 1)
    offsets: dict[int, int] = {}
    total = 0
    for src, p in sorted(board, key=lambda x: x[0]):
        offsets[src] = total
        total += p[1]
    return vertices, offsets, total


class AnnounceProtocol(Protocol):
    """Round i: every vertex broadcasts its i-th announced edge (or stays silent)."""

    name = "announce-edges"

    def __init__(self, announcements: Mapping[int, Sequence[Edge]], rounds: int) -> None:
        self.announcements = announcements
        self.rounds = rounds

    def init(self, vertex: VertexProcess) -> None:
        vertex.state["parts"] = ()

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        st = vertex.state
        if len(inbox.board):
            st["parts"] = st["parts"] + (_board_edges(inbox.board),)
        r = vertex.round
        if r > self.rounds:
            vertex.halt(_union_parts(vertex.n, frozenset(range(vertex.n)), st["parts"]))
            return
        mine = self.announcements.get(vertex.id, ())
        if r - 1 < len(mine):
            u, w = mine[r - 1]
            vertex.broadcast((u, w))


# ------------------------------
# Operations
# ------------------------------


def _run_sparse(
    graph: Graph,
    network: CliqueNetwork,
    residual: Mapping[int, frozenset[int] | None],
    start_index: int,
    threshold: int,
    c_sparse: int,
) -> SparseOutput:
    outputs = network.run(graph, SparsePartitionProtocol(residual, start_index, threshold, c_sparse))
    # every vertex ends with the same (levels, known) pair
    return outputs[0]


def sparse_partition(
    graph: Graph,
    a: float,
    eps: float,
    start_index: int = 1,
    network: CliqueNetwork | None = None,
    c_sparse: int = config.C_SPARSE,
) -> HPartition:
    """H-partition of a graph with O(n) edges: everyone learns it via Lenzen and peels locally.

    Raises:
        SparsePreconditionFailed: more than ``c_sparse * n`` edges, or ``a`` too small.
    """

    net = network if network is not None else CliqueNetwork(graph.n)
    thr = degree_threshold(a, eps)
    residual = {v: graph.neighbors(v) for v in graph.vertices()}
    out = _run_sparse(graph, net, residual, start_index, thr, c_sparse)
    return HPartition(dict(out.levels), thr)


def h_partition_cc(
    graph: Graph,
    a: float,
    eps: float,
    network: CliqueNetwork | None = None,
    q: float | None = None,
    c_sparse: int = config.C_SPARSE,
) -> HPartitionResult:
    """Peel for ``peeling_iterations`` rounds, then finish with Sparse-Partition.

    Raises:
        SparsePreconditionFailed: the promised ``a`` underestimates the arboricity.
    """

    network = network if network is not None else CliqueNetwork(graph.n)
    a = max(a, 1)
    iterations = peeling_iterations(a, eps, q)
    thr = degree_threshold(a, eps, q)

    before = network.stats.rounds
    peeled = network.run(graph, PeelingProtocol(iterations, thr))
    peeling_rounds = network.stats.rounds - before

    residual = {v: (out.residual_neighbors if out.level is None else None) for v, out in peeled.items()}
    residual_edges = sum(len(nb) for nb in residual.values() if nb is not None) // 2

    before = network.stats.rounds
    sparse = _run_sparse(graph, network, residual, iterations + 1, thr, c_sparse)
    sparse_r = network.stats.rounds - before

    level = {v: out.level for v, out in peeled.items() if out.level is not None}
    level.update(dict(sparse.levels))
    logger.debug(
        "h_partition_cc a=%s eps=%s: %d peeling rounds, residual %d edges, ell=%d",
        a,
        eps,
        peeling_rounds,
        residual_edges,
        max(level.values(), default=0),
    )
    return HPartitionResult(
        partition=HPartition(level, thr),
        learned_suffix=sparse.known,
        suffix_start=iterations + 1,
        peeling_rounds=peeling_rounds,
        sparse_rounds=sparse_r,
        residual_edges=residual_edges,
    )


def orientation(graph: Graph, hpartition: HPartition) -> dict[Edge, int]:
    """Head of every edge: the endpoint with the higher level, ties to the higher ID.

    Each endpoint evaluates this from neighbour levels it already holds, so it
    costs no rounds.
    """

    lv = hpartition.level
    head: dict[Edge, int] = {}
    for u, v in graph.edges:
        head[(u, v)] = v if (lv[v], v) > (lv[u], u) else u
    return head


def forests_decomposition_cc(
    graph: Graph,
    a: float,
    eps: float,
    network: CliqueNetwork | None = None,
    q: float | None = None,
    c_sparse: int = config.C_SPARSE,
) -> ForestLabeling:
    """Partition E' into at most ``degree_threshold(a, eps, q)`` oriented forests."""

    h = h_partition_cc(graph, a, eps, network, q=q, c_sparse=c_sparse)
    head = orientation(graph, h.partition)
    label: dict[Edge, int] = {}
    for v in graph.vertices():
        outgoing = sorted(u for u in graph.neighbors(v) if head[norm_edge(u, v)] == u)
        for i, u in enumerate(outgoing, start=1):
            label[norm_edge(u, v)] = i
    return ForestLabeling(head, label, h.partition.degree_bound, h)


def announce_edges(
    graph: Graph,
    announcements: Mapping[int, Sequence[Edge]],
    rounds: int,
    network: CliqueNetwork | None = None,
) -> dict[int, KnownGraph]:
    """Broadcast per-vertex edge lists, one edge per round, for exactly ``rounds`` rounds."""

    longest = max((len(x) for x in announcements.values()), default=0)
    if longest > rounds:
        raise InvalidParameters(f"a vertex announces {longest} edges in {rounds} rounds")
    net = network if network is not None else CliqueNetwork(graph.n)
    return net.run(graph, AnnounceProtocol(announcements, rounds))


def learn_graph(graph: Graph, labeling: ForestLabeling, network: CliqueNetwork | None = None) -> dict[int, KnownGraph]:
    """Round i: each vertex broadcasts its label-i parent edge; all learn G'."""

    announcements = {v: [norm_edge(v, u) for u, _ in labeling.parents(v, graph)] for v in graph.vertices()}
    return announce_edges(graph, announcements, labeling.num_labels, network)


def solve_locally(known: Mapping[int, KnownGraph], solver: Callable[[KnownGraph], Mapping[int, Any]]) -> dict[int, Any]:
    """Every vertex runs the same deterministic solver on its copy and keeps its own entry."""

    cache: dict[KnownGraph, Mapping[int, Any]] = {}
    out: dict[int, Any] = {}
    for v, kg in known.items():
        if kg not in cache:
            cache[kg] = solver(kg)
        out[v] = cache[kg].get(v)
    return out


# ------------------------------
# Local solvers
# ------------------------------


def greedy_coloring_by_id(known: KnownGraph) -> dict[int, int]:
    adj = known.adjacency()
    colors: dict[int, int] = {}
    for v in sorted(adj):
        used = {colors[u] for u in adj[v] if u in colors}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return colors


def degeneracy_order(adj: Mapping[int, set[int]]) -> list[int]:
    """Smallest-last order: repeatedly remove a minimum-degree vertex (ties to smaller ID)."""

    deg = {v: len(nb) for v, nb in adj.items()}
    buckets: dict[int, set[int]] = {}
    for v, d in deg.items():
        buckets.setdefault(d, set()).add(v)
    removed: set[int] = set()
    order: list[int] = []
    d = 0
    while len(order) < len(deg):
        d = max(0, d - 1)
        while not buckets.get(d):
            d += 1
        v = min(buckets[d])
        buckets[d].discard(v)
        removed.add(v)
        order.append(v)
        for u in adj[v]:
            if u not in removed:
                buckets[deg[u]].discard(u)
                deg[u] -= 1
                buckets.setdefault(deg[u], set()).add(u)
    return order


def degeneracy_coloring(known: KnownGraph) -> dict[int, int]:
    """Greedy coloring in reverse smallest-last order: at most degeneracy+1 colors."""

    adj = known.adjacency()
    colors: dict[int, int] = {}
    for v in reversed(degeneracy_order(adj)):
        used = {colors[u] for u in adj[v] if u in colors}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return colors


def greedy_mis_by_id(known: KnownGraph) -> dict[int, bool]:
    """Membership indicator of the greedy MIS that scans vertices by increasing ID."""

    adj = known.adjacency()
    member: dict[int, bool] = {}
    for v in sorted(adj):
        member[v] = not any(member.get(u, False) for u in adj[v])
    return member
