"""Maximal independent set in O(sqrt a) rounds.

The graph is split into q class subgraphs of small arboricity (by the
coloring recursion, or by one arbdefective level with k = t = ceil(sqrt a)),
every vertex learns the intra-class edges, and the classes are then handled
one after another: the non-removed vertices of class i compute a greedy MIS
of their residual component locally, winners announce themselves, their
neighbours announce removal. Two broadcast rounds per class.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Mapping

import networkx as nx

import config
from coloring import SplitResult, arbdefective_coloring_cc, class_rank, learn_classes, recursive_split
from decomposition import KnownGraph, forests_decomposition_cc, greedy_mis_by_id, learn_graph, solve_locally
from errors import InvalidParameters
from graph_model import Graph
from sim_engine import Board, CliqueNetwork, Inbox, Protocol, VertexProcess

logger = logging.getLogger(__name__)


@dataclass
class MisResult:
    members: frozenset[int]
    history: tuple[frozenset[int], ...] = ()
    classes: dict[int, int] = field(default_factory=dict)
    stats: dict[str, Any] = field(default_factory=dict)


@lru_cache(maxsize=4096)
def local_mis(known: KnownGraph, removed: frozenset[int] = frozenset()) -> frozenset[int]:
    """Greedy MIS by ascending ID over the vertices of ``known`` that are not removed."""

    adj = known.adjacency()
    chosen: set[int] = set()
    for v in sorted(adj):
        if v in removed or adj[v] & chosen:
            continue
        chosen.add(v)
    return frozenset(chosen)


@lru_cache(maxsize=16)
def components(known: KnownGraph) -> dict[int, KnownGraph]:
    """Connected component of every vertex, as its own KnownGraph."""

    g = nx.Graph()
    g.add_nodes_from(known.vertices)
    g.add_edges_from(known.edges)
    out: dict[int, KnownGraph] = {}
    for comp in nx.connected_components(g):
        members = frozenset(comp)
        edges = frozenset(e for e in known.edges if e[0] in members)
        kg = KnownGraph(known.n, edges, members)
        for v in members:
            out[v] = kg
    return out


@lru_cache(maxsize=4096)
def _grow(base: frozenset[int], extra: frozenset[int]) -> frozenset[int]:
    return base | extra if extra else base


def _senders(board: Board) -> frozenset[int]:
    return board.cached("senders", lambda: frozenset(src for src, _ in board))


class MisLoopProtocol(Protocol):
    """Iteration i spans two rounds: class-i winners, then their dominated neighbours."""

    name = "mis-loop"

    def __init__(self, known: Mapping[int, KnownGraph], order: Mapping[int, int], iterations: int) -> None:
        self.known = known
        self.order = order
        self.iterations = iterations

    def init(self, vertex: VertexProcess) -> None:
        vertex.state.update(removed=frozenset(), members=frozenset(), history=())

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        st = vertex.state
        i, phase = divmod(vertex.round - 1, 2)

        if phase == 0:
            st["removed"] = _grow(st["removed"], _senders(inbox.board))
            if i >= self.iterations:
                vertex.halt((vertex.id in st["members"], st["history"]))
                return
            if self.order[vertex.id] == i and vertex.id not in st["removed"]:
                comp = components(self.known[vertex.id])[vertex.id]
                if vertex.id in local_mis(comp, st["removed"]):
                    vertex.broadcast((1,))
            return

        winners = _senders(inbox.board)
        st["members"] = _grow(st["members"], winners)
        st["removed"] = _grow(st["removed"], winners)
        st["history"] = st["history"] + (st["members"],)
        if vertex.id not in st["removed"] and vertex.neighbors & winners:
            vertex.broadcast((1,))


def _fallback(graph: Graph, a: float, eps_h: float, net: CliqueNetwork) -> MisResult:
    before = net.stats.rounds
    labeling = forests_decomposition_cc(graph, max(1.0, a), eps_h, net)
    decomposition_rounds = net.stats.rounds - before
    known = learn_graph(graph, labeling, net)
    member = solve_locally(known, greedy_mis_by_id)
    members = frozenset(v for v, inside in member.items() if inside)
    stats = {
        "decomposition_rounds": decomposition_rounds,
        "learning_rounds": net.stats.rounds - before - decomposition_rounds,
        "loop_rounds": 0,
        "iterations": 1,
        "fallback": True,
        "rounds": net.stats.rounds - before,
        "p": None,
        "t": None,
    }
    return MisResult(members, (members,), {v: 0 for v in graph.vertices()}, stats)


def sqrt_split(
    graph: Graph, a: float, eps_h: float, net: CliqueNetwork, width: int | None = None
) -> tuple[SplitResult, int]:
    """One arbdefective level with k = t = width, ceil(sqrt a) by default: (split, number of classes)."""

    k = width if width is not None else max(1, math.ceil(math.sqrt(a) - 1e-9))
    if k < 1:
        raise InvalidParameters(f"split width must be >= 1, got {k}")
    before = net.stats.rounds
    res = arbdefective_coloring_cc(graph, a, k, k, eps_h, net)
    sub = graph.edge_subgraph(e for e in graph.edges if res.colors[e[0]] == res.colors[e[1]])
    paths = {v: (res.colors[v],) for v in graph.vertices()}
    split = SplitResult(paths, 1, float(res.bound), sub, res.witness, res.bound, net.stats.rounds - before)
    return split, k


def mis_cc(
    graph: Graph,
    a: float,
    eps_h: float = config.EPS_H,
    split: str = "sqrt",
    network: CliqueNetwork | None = None,
    t: int | None = None,
) -> MisResult:
    """MIS of an arboricity-a graph.

    ``split="sqrt"`` uses a single arbdefective level with k = t classes,
    ceil(sqrt a) unless ``t`` is given; this is the O(sqrt a)-round mode.
    ``split="recursive"`` uses the coloring recursion with p = ceil(a^(1/8))
    while alpha > p^4; when p <= 3 + eps_h that recursion cannot shrink and
    the O(a)-round learn-everything solver runs instead (``stats["fallback"]``).
    """

    if split not in config.MIS_SPLITS:
        raise InvalidParameters(f"unknown split mode {split!r}; expected one of {config.MIS_SPLITS}")
    if t is not None and split != "sqrt":
        raise InvalidParameters("t only applies to split='sqrt'")
    net = network if network is not None else CliqueNetwork(graph.n)
    before = net.stats.rounds

    if split == "sqrt":
        parts, base = sqrt_split(graph, a, eps_h, net, t)
        used = {"p": None, "t": base}
    else:
        p = math.ceil(max(1.0, a) ** 0.125 - 1e-9)
        if p <= 3 + eps_h:
            logger.info("mis_cc: p = %d <= 3 + eps_h, using the learn-everything fallback", p)
            return _fallback(graph, a, eps_h, net)
        parts = recursive_split(graph, a, p, p**4, eps_h, net)
        base = p
        used = {"p": p, "t": None}
    iterations = base**parts.depth

    before_learn = net.stats.rounds
    known = learn_classes(parts, eps_h, net)
    learning_rounds = net.stats.rounds - before_learn

    order = {v: class_rank(parts.paths[v], base) for v in graph.vertices()}
    before_loop = net.stats.rounds
    outputs = net.run(graph, MisLoopProtocol(known, order, iterations))
    loop_rounds = net.stats.rounds - before_loop

    members = frozenset(v for v, (inside, _) in outputs.items() if inside)
    history = outputs[0][1] if outputs else ()
    stats = {
        "decomposition_rounds": parts.rounds,
        "learning_rounds": learning_rounds,
        "loop_rounds": loop_rounds,
        "iterations": iterations,
        "fallback": False,
        "rounds": net.stats.rounds - before,
        **used,
    }
    logger.debug("mis_cc split=%s: |M|=%d, %s", split, len(members), stats)
    return MisResult(members, history, order, stats)
