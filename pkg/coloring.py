"""Coloring procedures for bounded-arboricity graphs on the Congested Clique.

* :func:`arb_linial` - O(A^2)-coloring from a forest decomposition, O(log* n) rounds.
* :func:`fast_coloring_a2eps` - O(a^{2+eps}) colors with a constant-length peeling phase.
* :func:`defective_coloring` and :func:`partial_orientation_cc` - the building
  blocks of :func:`arbdefective_coloring_cc`.
* :func:`proper_coloring_cc` - recursive splitting into classes of shrinking
  arboricity, leaves colored after learning them; :func:`a1eps_coloring` and
  :func:`o_a_coloring` are its two standard parameterisations.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Mapping, Sequence

import networkx as nx

import config
from decomposition import (
    ForestLabeling,
    HPartitionResult,
    KnownGraph,
    announce_edges,
    degeneracy_coloring,
    forests_decomposition_cc,
    h_partition_cc,
    learn_graph,
    solve_locally,
)
from errors import InvalidParameters, ProtocolError, Stall
from graph_model import Edge, Graph, norm_edge
from sim_engine import CliqueNetwork, Inbox, Protocol, VertexProcess, simulate_locally
from utils import ceil_log2, iroot_ceil, next_prime

logger = logging.getLogger(__name__)


# ------------------------------
# Types
# ------------------------------


class ColoringKind(str, Enum):
    PROPER = "proper"
    DEFECTIVE = "defective"
    ARBDEFECTIVE = "arbdefective"


@dataclass
class Coloring:
    """Colors in [1, palette_size]; ``bound`` is m for defective(m) and r for arbdefective(r).

    ``witness`` (arbdefective only) maps every edge to its head, or None when
    the edge is unoriented.
    """

    colors: dict[int, int]
    kind: ColoringKind = ColoringKind.PROPER
    bound: int = 0
    palette_size: int = 0
    witness: Mapping[Edge, int | None] | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def used_colors(self) -> int:
        return len(set(self.colors.values()))


@dataclass
class PartialOrientation:
    status: dict[Edge, int | None]
    deficit_bound: int
    outdeg_bound: int

    def arcs(self) -> list[tuple[int, int]]:
        out = []
        for (u, v), head in self.status.items():
            if head is not None:
                out.append((u if head == v else v, head))
        return out

    def longest_path(self) -> int:
        dg = nx.DiGraph(self.arcs())
        return nx.dag_longest_path_length(dg) if dg.number_of_edges() else 0


@dataclass
class PartialOrientationResult:
    orientation: PartialOrientation
    h: HPartitionResult
    coloring: Coloring
    rounds: int = 0


# ------------------------------
# Polynomial set systems
# ------------------------------


@dataclass(frozen=True)
class PolynomialFamily:
    """Degree-d polynomials over GF(q), one per color.

    Color c owns the polynomial whose coefficients are the base-q digits of
    c - 1; choosing evaluation point x yields the new color x*q + f_c(x) + 1.
    Distinct colors below q^(d+1) own distinct polynomials, which agree on
    at most d points.
    """

    q: int
    d: int

    @property
    def palette(self) -> int:
        return self.q * self.q

    @property
    def capacity(self) -> int:
        return self.q ** (self.d + 1)

    def evaluate(self, color: int, x: int) -> int:
        value = 0
        for a in reversed(_digits(color - 1, self.q, self.d + 1)):
            value = (value * x + a) % self.q
        return value

    def encode(self, x: int, y: int) -> int:
        return x * self.q + y + 1


@lru_cache(maxsize=1 << 16)
def _digits(value: int, base: int, count: int) -> tuple[int, ...]:
    out = []
    for _ in range(count):
        value, r = divmod(value, base)
        out.append(r)
    return tuple(out)


def next_family(m: int, max_parents: int) -> PolynomialFamily | None:
    """Family giving the smallest new palette for an m-coloring, or None if none shrinks it.

    Requires q > max_parents * d so some point avoids every parent.
    """

    best: PolynomialFamily | None = None
    for d in range(1, max(1, ceil_log2(m)) + 1):
        fam = PolynomialFamily(next_prime(max(max_parents * d + 1, iroot_ceil(m, d + 1))), d)
        if best is None or fam.palette < best.palette:
            best = fam
    if best is None or best.palette >= m:
        return None
    return best


def tolerant_family(m: int, p: int) -> PolynomialFamily | None:
    """Family with q >= p*d: the best point collides with at most floor(Delta/p) neighbours."""

    best: PolynomialFamily | None = None
    for d in range(1, max(1, ceil_log2(m)) + 1):
        fam = PolynomialFamily(next_prime(max(p * d, iroot_ceil(m, d + 1))), d)
        if best is None or fam.palette < best.palette:
            best = fam
    if best is None or best.palette >= m:
        return None
    return best


def linial_schedule(m: int, max_parents: int) -> list[PolynomialFamily]:
    """Recoloring steps from an m-coloring down to the fixpoint palette."""

    steps: list[PolynomialFamily] = []
    while (fam := next_family(m, max_parents)) is not None:
        steps.append(fam)
        m = fam.palette
    return steps


def recolor(fam: PolynomialFamily, color: int, others: Sequence[int], tolerant: bool = False) -> int:
    """One recoloring step of a vertex against the colors it watches.

    Strict mode picks the smallest point where no watched polynomial agrees
    with the vertex's own; tolerant mode the point with fewest agreements.
    """

    best_x, best_hits = 0, None
    for x in range(fam.q):
        mine = fam.evaluate(color, x)
        hits = sum(1 for c in others if fam.evaluate(c, x) == mine)
        if hits == 0:
            return fam.encode(x, mine)
        if tolerant and (best_hits is None or hits < best_hits):
            best_x, best_hits = x, hits
    if not tolerant:
        raise ProtocolError(f"no collision-free point for color {color} among {len(others)} watched colors")
    return fam.encode(best_x, fam.evaluate(color, best_x))


class LinialProtocol(Protocol):
    """Each round a vertex sends its color to ``notify`` and recolors against ``watch``."""

    name = "linial-recoloring"

    def __init__(
        self,
        watch: Mapping[int, frozenset[int]],
        notify: Mapping[int, frozenset[int]],
        initial: Mapping[int, int],
        schedule: Sequence[tuple[PolynomialFamily, bool]],
        announce: bool = False,
    ) -> None:
        self.watch = watch
        self.notify = notify
        self.initial = initial
        self.schedule = schedule
        self.announce = announce

    def init(self, vertex: VertexProcess) -> None:
        vertex.state["color"] = self.initial[vertex.id]

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        st = vertex.state
        r = vertex.round
        last = len(self.schedule)
        received = {src: payload[0] for src, payload in inbox}

        if 2 <= r <= last + 1:
            fam, tolerant = self.schedule[r - 2]
            others = [received[u] for u in sorted(self.watch[vertex.id])]
            st["color"] = recolor(fam, st["color"], others, tolerant)
        if r == last + 2:
            vertex.halt((st["color"], received))
            return

        if r <= last or (self.announce and r == last + 1):
            for u in sorted(self.notify[vertex.id]):
                vertex.send(u, (st["color"],))
        else:
            vertex.halt((st["color"], None))


def _run(graph: Graph, protocol: Protocol, network: CliqueNetwork | None, local: bool) -> dict[int, Any]:
    if local:
        return simulate_locally(graph, protocol)
    net = network if network is not None else CliqueNetwork(graph.n)
    return net.run(graph, protocol)


# ------------------------------
# O(a^2)-coloring
# ------------------------------


def arb_linial(
    graph: Graph,
    labeling: ForestLabeling,
    max_parents: int | None = None,
    network: CliqueNetwork | None = None,
) -> Coloring:
    """Proper coloring in which every vertex only ever compares against its parents."""

    A = labeling.num_labels if max_parents is None else max_parents
    parents = {v: frozenset(u for u, _ in labeling.parents(v, graph)) for v in graph.vertices()}
    children = {v: frozenset(labeling.children(v, graph)) for v in graph.vertices()}
    initial = {v: (v + 2 if parents[v] else 1) for v in graph.vertices()}
    steps = linial_schedule(graph.n + 1, A)
    outputs = _run(graph, LinialProtocol(parents, children, initial, [(f, False) for f in steps]), network, False)
    palette = steps[-1].palette if steps else graph.n + 1
    logger.debug("arb_linial A=%d: %d recoloring rounds, palette %d", A, len(steps), palette)
    return Coloring(
        {v: out[0] for v, out in outputs.items()},
        ColoringKind.PROPER,
        palette_size=palette,
        stats={"linial_rounds": len(steps), "max_parents": A},
    )


def arb_coloring_cc(graph: Graph, a: float, eps: float = config.DEFAULT_EPS, network: CliqueNetwork | None = None) -> Coloring:
    net = network if network is not None else CliqueNetwork(graph.n)
    before = net.stats.rounds
    labeling = forests_decomposition_cc(graph, a, eps, net)
    coloring = arb_linial(graph, labeling, network=net)
    coloring.stats.update(rounds=net.stats.rounds - before, forests=labeling.num_labels)
    return coloring


def fast_coloring_a2eps(
    graph: Graph,
    a: float,
    eps: float,
    eps_h: float = config.EPS_H,
    network: CliqueNetwork | None = None,
) -> Coloring:
    """Arb-Linial on a forest decomposition whose H-partition uses threshold (2 + a^eps)a.

    For a < 2 the second parameter collapses to 1 and the standard pipeline runs.
    """

    net = network if network is not None else CliqueNetwork(graph.n)
    before = net.stats.rounds
    q = a**eps if a >= 2 else None
    labeling = forests_decomposition_cc(graph, a, eps if q is not None else eps_h, net, q=q)
    coloring = arb_linial(graph, labeling, network=net)
    coloring.stats.update(
        rounds=net.stats.rounds - before,
        forests=labeling.num_labels,
        peeling_rounds=labeling.h.peeling_rounds if labeling.h else 0,
    )
    return coloring


# ------------------------------
# Defective coloring and partial orientations
# ------------------------------


def defective_coloring(
    graph: Graph,
    p: int,
    groups: Mapping[int, Any] | None = None,
    max_degree: int | None = None,
    network: CliqueNetwork | None = None,
    local: bool = False,
    announce: bool = False,
) -> Coloring:
    """Defective coloring of every group-induced subgraph in parallel.

    Only edges between vertices of the same group count; vertices outside
    ``groups`` take color 1. Runs Linial to a proper fixpoint, then at most
    one collision-tolerant step, so every vertex ends with at most
    floor(max_degree / p) same-colored neighbours inside its group.

    The tolerant step needs q >= p*d and q^(d+1) >= m, so the palette is
    q^2 ~ (p*d)^2 rather than O(p^2): the factor c_D = palette / p^2 grows
    like (log m / log p)^2 and is reported as ``stats["palette_per_p2"]``.
    Further tolerant steps would add their defects, so only one runs.
    """

    if p < 1:
        raise InvalidParameters(f"defective coloring needs p >= 1, got {p}")

    def same_group(v: int, u: int) -> bool:
        if groups is None:
            return True
        g = groups.get(v)
        return g is not None and groups.get(u) == g

    watch = {v: frozenset(u for u in graph.neighbors(v) if same_group(v, u)) for v in graph.vertices()}
    delta = max((len(w) for w in watch.values()), default=0) if max_degree is None else max_degree
    bound = delta // p

    if p == 1 or delta == 0:
        return Coloring({v: 1 for v in graph.vertices()}, ColoringKind.DEFECTIVE, bound, 1, stats={"rounds": 0})

    initial = {v: (v + 2 if watch[v] else 1) for v in graph.vertices()}
    m = graph.n + 1
    schedule: list[tuple[PolynomialFamily, bool]] = [(f, False) for f in linial_schedule(m, delta)]
    if schedule:
        m = schedule[-1][0].palette
    tolerant = tolerant_family(m, p) if bound > 0 else None
    if tolerant is not None:
        schedule.append((tolerant, True))
        m = tolerant.palette

    outputs = _run(graph, LinialProtocol(watch, watch, initial, schedule, announce), network, local)
    return Coloring(
        {v: out[0] for v, out in outputs.items()},
        ColoringKind.DEFECTIVE,
        bound,
        m,
        stats={
            "recoloring_rounds": len(schedule),
            "tolerant": tolerant is not None,
            "tolerant_q": tolerant.q if tolerant else None,
            "tolerant_d": tolerant.d if tolerant else None,
            "palette_per_p2": m / (p * p),
        },
    )


def partial_orientation_cc(
    graph: Graph,
    a: float,
    t: float,
    eps: float,
    network: CliqueNetwork | None = None,
) -> PartialOrientationResult:
    """Acyclic orientation of all but at most floor(a/t) edges per vertex.

    Cross-level edges point to the higher H-level, same-level edges to the
    higher defective color; same-level same-color edges stay unoriented.
    """

    if t < 1:
        raise InvalidParameters(f"t must be >= 1, got {t}")
    net = network if network is not None else CliqueNetwork(graph.n)
    before = net.stats.rounds
    h = h_partition_cc(graph, a, eps, net)
    level = h.partition.level
    thr = h.partition.degree_bound
    p_inner = math.ceil((2.0 + eps) * t - 1e-9)

    suffix = {v: lv for v, lv in level.items() if lv >= h.suffix_start}
    lower = {v: lv for v, lv in level.items() if lv < h.suffix_start}

    colors: dict[int, int] = {}
    palette = 1
    if suffix:
        # the suffix graph is known to every vertex, so its coloring costs nothing
        high = defective_coloring(h.learned_suffix.to_graph(), p_inner, suffix, thr, local=True)
        colors.update({v: high.colors[v] for v in suffix})
        palette = max(palette, high.palette_size)
    if lower:
        low = defective_coloring(graph, p_inner, lower, thr, network=net, announce=True)
        colors.update({v: low.colors[v] for v in lower})
        palette = max(palette, low.palette_size)

    status: dict[Edge, int | None] = {}
    for u, v in graph.edges:
        if level[u] != level[v]:
            status[(u, v)] = u if level[u] > level[v] else v
        elif colors[u] != colors[v]:
            status[(u, v)] = u if colors[u] > colors[v] else v
        else:
            status[(u, v)] = None

    orientation = PartialOrientation(status, int(math.floor(a / t + 1e-9)), thr)
    coloring = Coloring(colors, ColoringKind.DEFECTIVE, thr // p_inner, palette)
    rounds = net.stats.rounds - before
    logger.debug("partial_orientation_cc a=%s t=%s: p'=%d, %d rounds", a, t, p_inner, rounds)
    return PartialOrientationResult(orientation, h, coloring, rounds)


# ------------------------------
# Arbdefective coloring
# ------------------------------


class ArbdefectiveProtocol(Protocol):
    """Color once every parent has; take the color fewest parents use."""

    name = "simple-arbdefective"

    def __init__(
        self,
        parents: Mapping[int, frozenset[int]],
        children: Mapping[int, frozenset[int]],
        k: int,
        participants: frozenset[int],
        preset: Mapping[int, int],
    ) -> None:
        self.parents = parents
        self.children = children
        self.k = k
        self.participants = participants
        self.preset = preset

    def init(self, vertex: VertexProcess) -> None:
        if vertex.id not in self.participants:
            vertex.halt(self.preset.get(vertex.id))
            return
        vertex.state["known"] = {u: self.preset[u] for u in self.parents[vertex.id] if u in self.preset}

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        known = vertex.state["known"]
        for src, payload in inbox:
            known[src] = payload[0]
        if len(known) < len(self.parents[vertex.id]):
            if vertex.round > vertex.n:
                raise Stall(f"vertex {vertex.id} still waits for {len(self.parents[vertex.id]) - len(known)} parents")
            return
        color = pick_least_used(known.values(), self.k)
        for u in sorted(self.children[vertex.id]):
            vertex.send(u, (color,))
        vertex.halt(color)


def pick_least_used(parent_colors: Any, k: int) -> int:
    """Color in [1, k] used by the fewest parents, ties to the smallest."""

    counts = Counter(parent_colors)
    return min(range(1, k + 1), key=lambda c: (counts[c], c))


def simple_arbdefective(
    graph: Graph,
    orientation: PartialOrientation,
    k: int,
    network: CliqueNetwork | None = None,
    participants: frozenset[int] | None = None,
    preset: Mapping[int, int] | None = None,
    local: bool = False,
) -> Coloring:
    """Arbdefective k-coloring along an acyclic partial orientation.

    Raises:
        Stall: some vertex never sees all its parents colored.
    """

    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    members = frozenset(graph.vertices()) if participants is None else participants
    parents: dict[int, frozenset[int]] = {}
    children: dict[int, frozenset[int]] = {}
    for v in graph.vertices():
        heads = [(u, orientation.status.get(norm_edge(u, v))) for u in graph.neighbors(v)]
        parents[v] = frozenset(u for u, hd in heads if hd == u)
        children[v] = frozenset(u for u, hd in heads if hd == v and u in members)
    protocol = ArbdefectiveProtocol(parents, children, k, members, preset or {})
    outputs = _run(graph, protocol, network, local)
    colors = {v: outputs[v] for v in members}
    return Coloring(
        colors,
        ColoringKind.ARBDEFECTIVE,
        orientation.deficit_bound + orientation.outdeg_bound // k,
        k,
        witness=orientation.status,
    )


def arbdefective_coloring_cc(
    graph: Graph,
    a: float,
    k: int,
    t: float,
    eps: float,
    network: CliqueNetwork | None = None,
) -> Coloring:
    """k-coloring whose classes have arboricity at most floor(a/t + (2+eps)a/k)."""

    net = network if network is not None else CliqueNetwork(graph.n)
    before = net.stats.rounds
    po = partial_orientation_cc(graph, a, t, eps, net)
    level = po.h.partition.level
    suffix = frozenset(v for v, lv in level.items() if lv >= po.h.suffix_start)
    lower = frozenset(graph.vertices()) - suffix

    colors: dict[int, int] = {}
    if suffix:
        high = simple_arbdefective(po.h.learned_suffix.to_graph(), po.orientation, k, participants=suffix, local=True)
        colors.update(high.colors)
    before_low = net.stats.rounds
    if lower:
        low = simple_arbdefective(graph, po.orientation, k, net, participants=lower, preset=colors)
        colors.update(low.colors)

    bound = int(math.floor(a / t + (2.0 + eps) * a / k + 1e-9))
    stats = {
        "rounds": net.stats.rounds - before,
        "orientation_rounds": po.rounds,
        "arbdefective_rounds": net.stats.rounds - before_low,
        "longest_path": po.orientation.longest_path(),
    }
    return Coloring(colors, ColoringKind.ARBDEFECTIVE, bound, k, witness=po.orientation.status, stats=stats)


# ------------------------------
# Recursive proper coloring
# ------------------------------


@dataclass
class SplitResult:
    """Class vector per vertex after recursive arbdefective splitting."""

    paths: dict[int, tuple[int, ...]]
    depth: int
    alpha: float
    subgraph: Graph
    witness: Mapping[Edge, int | None] | None
    witness_bound: int
    rounds: int


def recursive_split(
    graph: Graph,
    alpha: float,
    p: int,
    stop_threshold: float,
    eps_h: float = config.EPS_H,
    network: CliqueNetwork | None = None,
) -> SplitResult:
    """Split into p arbdefective classes, recursively, while alpha > stop_threshold.

    All current subgraphs are vertex-disjoint, so one run on the union of
    their edges handles every subgraph of a level at once.
    """

    if alpha > stop_threshold and p <= 3 + eps_h:
        raise InvalidParameters(f"p = {p} must exceed 3 + eps_h = {3 + eps_h} for the recursion to shrink")
    net = network if network is not None else CliqueNetwork(graph.n)
    before = net.stats.rounds
    paths: dict[int, tuple[int, ...]] = {v: () for v in graph.vertices()}
    sub = graph
    witness: Mapping[Edge, int | None] | None = None
    witness_bound = int(math.floor(alpha + 1e-9))
    depth = 0
    while alpha > stop_threshold:
        res = arbdefective_coloring_cc(sub, alpha, p, p, eps_h, net)
        for v in graph.vertices():
            paths[v] = paths[v] + (res.colors[v],)
        sub = graph.edge_subgraph(e for e in sub.edges if res.colors[e[0]] == res.colors[e[1]])
        witness, witness_bound = res.witness, res.bound
        alpha = (3.0 + eps_h) * alpha / p
        depth += 1
        logger.debug("split level %d: alpha -> %.3f, %d edges stay inside classes", depth, alpha, sub.m)
    return SplitResult(paths, depth, alpha, sub, witness, witness_bound, net.stats.rounds - before)


def learn_classes(
    split: SplitResult,
    eps_h: float = config.EPS_H,
    network: CliqueNetwork | None = None,
) -> dict[int, KnownGraph]:
    """Make the intra-class edges known to every vertex.

    After at least one split level the last witness orientation is used:
    every edge is announced by its tail (unoriented ones by the smaller ID),
    at most ``witness_bound`` per vertex. Without a split a forest
    decomposition supplies the announcement order.
    """

    sub = split.subgraph
    net = network if network is not None else CliqueNetwork(sub.n)
    if split.depth == 0 or split.witness is None:
        labeling = forests_decomposition_cc(sub, max(1.0, split.alpha), eps_h, net)
        return learn_graph(sub, labeling, net)
    announcements: dict[int, list[Edge]] = {}
    for e in sub.sorted_edges():
        head = split.witness.get(e)
        speaker = min(e) if head is None else (e[0] if head == e[1] else e[1])
        announcements.setdefault(speaker, []).append(e)
    return announce_edges(sub, announcements, split.witness_bound, net)


def class_rank(path: Sequence[int], p: int) -> int:
    """Lexicographic rank of a class vector over [1, p]."""

    rank = 0
    for c in path:
        rank = rank * p + (c - 1)
    return rank


def proper_coloring_cc(
    graph: Graph,
    alpha: float,
    p: int,
    stop_threshold: float,
    eps_h: float = config.EPS_H,
    network: CliqueNetwork | None = None,
) -> Coloring:
    """Proper coloring with p^depth * (2 floor(alpha_leaf) + 1) colors.

    Raises:
        InvalidParameters: p <= 3 + eps_h while alpha > stop_threshold, p < 2, stop_threshold < p, or a
            leaf needs more colors than its arboricity promise allows.
    """

    if p < 2 or stop_threshold < p:
        raise InvalidParameters(f"need p >= 2 and stop_threshold >= p (p={p}, stop_threshold={stop_threshold})")
    net = network if network is not None else CliqueNetwork(graph.n)
    before = net.stats.rounds
    split = recursive_split(graph, max(1.0, alpha), p, stop_threshold, eps_h, net)

    before_leaf = net.stats.rounds
    known = learn_classes(split, eps_h, net)
    leaf = solve_locally(known, degeneracy_coloring)

    leaf_bound = split.witness_bound if split.depth else int(math.floor(split.alpha + 1e-9))
    leaf_palette = 2 * leaf_bound + 1
    worst = max(leaf.values(), default=1)
    if worst > leaf_palette:
        raise InvalidParameters(f"leaf coloring needs {worst} colors, arboricity promise allows {leaf_palette}")

    colors = {v: class_rank(split.paths[v], p) * leaf_palette + leaf[v] for v in graph.vertices()}
    palette = p**split.depth * leaf_palette
    stats = {
        "rounds": net.stats.rounds - before,
        "p": p,
        "split_rounds": split.rounds,
        "leaf_rounds": net.stats.rounds - before_leaf,
        "depth": split.depth,
        "leaf_alpha": split.alpha,
        "leaf_palette": leaf_palette,
    }
    logger.debug("proper_coloring_cc p=%d: depth %d, palette %d, %d rounds", p, split.depth, palette, stats["rounds"])
    return Coloring(colors, ColoringKind.PROPER, palette_size=palette, stats=stats)


def a1eps_coloring(
    graph: Graph,
    a: float,
    eps_h: float = config.EPS_H,
    network: CliqueNetwork | None = None,
    p: int | None = None,
) -> Coloring:
    """proper_coloring_cc with stop_threshold = p, p = floor(3 + eps_h) + 2 unless given."""

    if p is None:
        p = int(math.floor(3 + eps_h)) + 2
    return proper_coloring_cc(graph, a, p, p, eps_h, network)


def o_a_coloring(
    graph: Graph,
    a: float,
    eps: float,
    eps_h: float = config.EPS_H,
    network: CliqueNetwork | None = None,
    p: int | None = None,
) -> Coloring:
    """O(a)-coloring: p = ceil(a^(eps/3)) unless given, stop_threshold = p.

    Raises:
        InvalidParameters: the derived p = ceil(a^(eps/3)) is <= 3 + eps_h.
    """

    if p is None:
        p = math.ceil(a ** (eps / 3.0) - 1e-9)
        if p <= 3 + eps_h:
            raise InvalidParameters(
                f"p = ceil({a}^({eps}/3)) = {p} must exceed 3 + eps_h = {3 + eps_h}; raise a or eps"
            )
    coloring = proper_coloring_cc(graph, a, p, p, eps_h, network)
    coloring.stats.update(palette_ratio=coloring.palette_size / max(1.0, a))
    return coloring
