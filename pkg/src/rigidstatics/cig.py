"""Contact interface graph (CIG): trimming, contraction, and max-flow.

Assembly slipping robustness is the maximum flow from the loaded body to
the merged fixed node, with per-interface capacities supplied by the
caller. Parallel interfaces add their capacities; series chains carry the
minimum. Infinite capacities are represented exactly with math.inf.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .contacts import ContactInterface
from .scene import Scene

FIXED_NODE = "__fixed__"
AUG_EPS = 1e-12  # residual capacities below this count as saturated


@dataclass(frozen=True)
class GraphEdge:
    iid: str
    u: str
    v: str

    def pair(self) -> tuple[str, str]:
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


@dataclass
class ContactInterfaceGraph:
    nodes: list[str]
    edges: list[GraphEdge]
    capacities: dict[str, float] = field(default_factory=dict)  # iid -> N

    def with_capacities(self, capacities: dict[str, float]) -> "ContactInterfaceGraph":
        return ContactInterfaceGraph(list(self.nodes), list(self.edges), dict(capacities))

    def degree(self, node: str) -> int:
        return sum(1 for e in self.edges if node in (e.u, e.v))


@dataclass(frozen=True)
class FlowNetwork:
    graph: ContactInterfaceGraph
    source: str
    sink: str

    def __post_init__(self):
        if self.source == self.sink:
            raise ValueError("flow network source and sink must differ")


def build_cig(scene: Scene, interfaces: list[ContactInterface]) -> ContactInterfaceGraph:
    """Nodes are free bodies plus one merged fixed node; one edge per interface."""
    fixed = set(scene.fixed_ids)

    def node_of(bid: str) -> str:
        return FIXED_NODE if bid in fixed else bid

    nodes = sorted(scene.free_ids)
    if fixed:
        nodes.append(FIXED_NODE)
    edges = []
    for itf in interfaces:
        u, v = node_of(itf.body_a), node_of(itf.body_b)
        if u == v:
            continue  # interface between two fixed bodies carries no information
        edges.append(GraphEdge(itf.iid, u, v))
    return ContactInterfaceGraph(nodes, edges)


def _simple_nx(graph: ContactInterfaceGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(graph.nodes)
    for e in graph.edges:
        g.add_edge(e.u, e.v)
    return g


def path_membership(
    graph: ContactInterfaceGraph, source: str, sink: str
) -> tuple[set[str], set[tuple[str, str]]]:
    """Nodes and (canonical) node pairs lying on simple source-sink paths.

    Computed from the block-cut tree: an edge of a biconnected block lies on
    a simple path between any two vertices that the block chain connects.
    """
    for n in (source, sink):
        if n not in graph.nodes:
            raise ValueError(f"node {n!r} not in graph")
    if source == sink:
        return {source}, set()
    g = _simple_nx(graph)
    if not nx.has_path(g, source, sink):
        return {source, sink}, set()
    blocks = list(nx.biconnected_components(g))
    cuts = set(nx.articulation_points(g))
    tree = nx.Graph()
    for i, blk in enumerate(blocks):
        tree.add_node(("B", i))
        for v in blk & cuts:
            tree.add_edge(("B", i), ("C", v))

    def locate(v: str):
        if v in cuts:
            return ("C", v)
        for i, blk in enumerate(blocks):
            if v in blk:
                return ("B", i)
        return None

    path = nx.shortest_path(tree, locate(source), locate(sink))
    keep_nodes: set[str] = {source, sink}
    keep_pairs: set[tuple[str, str]] = set()
    for tn in path:
        if tn[0] == "B":
            blk = blocks[tn[1]]
            keep_nodes |= blk
            for u, v in g.edges(blk):
                if u in blk and v in blk:
                    keep_pairs.add((u, v) if u <= v else (v, u))
    return keep_nodes, keep_pairs


def simplify(
    graph: ContactInterfaceGraph, source: str, sink: str
) -> ContactInterfaceGraph:
    """Trim off-path nodes, then contract parallel (sum) and series (min)
    edges to a flow-equivalent reduced graph. Requires capacities."""
    keep_nodes, keep_pairs = path_membership(graph, source, sink)
    work: list[tuple[str, str, float]] = []
    for e in graph.edges:
        if e.pair() in keep_pairs:
            work.append((e.u, e.v, graph.capacities[e.iid]))

    changed = True
    while changed:
        changed = False
        work = [(u, v, c) for u, v, c in work if u != v]
        # parallel: merge by endpoint pair, capacities add
        merged: dict[tuple[str, str], float] = {}
        for u, v, c in work:
            key = (u, v) if u <= v else (v, u)
            merged[key] = merged.get(key, 0.0) + c
        if len(merged) != len(work):
            changed = True
        work = [(u, v, c) for (u, v), c in sorted(merged.items())]
        # series: splice out a degree-2 intermediate node, capacity = min
        degree: dict[str, list[int]] = {}
        for idx, (u, v, _) in enumerate(work):
            degree.setdefault(u, []).append(idx)
            degree.setdefault(v, []).append(idx)
        for node, idxs in degree.items():
            if node in (source, sink) or len(idxs) != 2:
                continue
            (u1, v1, c1), (u2, v2, c2) = work[idxs[0]], work[idxs[1]]
            a = v1 if u1 == node else u1
            b = v2 if u2 == node else u2
            if a == b == node:
                continue  # self loop, drop below
            work = [w for k, w in enumerate(work) if k not in idxs]
            work.append((a, b, min(c1, c2)))
            changed = True
            break
        work = [(u, v, c) for u, v, c in work if u != v]

    nodes = sorted({source, sink} | {u for u, _, _ in work} | {v for _, v, _ in work})
    edges, capacities = [], {}
    for k, (u, v, c) in enumerate(sorted(work)):
        iid = f"m{k}"
        edges.append(GraphEdge(iid, u, v))
        capacities[iid] = c
    return ContactInterfaceGraph(nodes, edges, capacities)


def slipping_max_flow(network: FlowNetwork) -> float:
    """Exact maximum flow (Edmonds-Karp on the undirected network).

    Returns math.inf iff an all-infinite-capacity augmenting path exists;
    0.0 when source and sink are disconnected.
    """
    graph = network.graph
    s, t = network.source, network.sink
    residual: dict[str, dict[str, float]] = {n: {} for n in graph.nodes}
    for e in graph.edges:
        c = graph.capacities[e.iid]
        if c < 0:
            raise ValueError(f"negative capacity on {e.iid}")
        residual[e.u][e.v] = residual[e.u].get(e.v, 0.0) + c
        residual[e.v][e.u] = residual[e.v].get(e.u, 0.0) + c

    total = 0.0
    while True:
        parent: dict[str, str] = {s: s}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for v, r in residual[u].items():
                if v not in parent and r > AUG_EPS:
                    parent[v] = u
                    queue.append(v)
        if t not in parent:
            return total
        bottleneck = math.inf
        v = t
        while v != s:
            u = parent[v]
            bottleneck = min(bottleneck, residual[u][v])
            v = u
        if math.isinf(bottleneck):
            return math.inf
        v = t
        while v != s:
            u = parent[v]
            residual[u][v] -= bottleneck
            residual[v][u] = residual[v].get(u, 0.0) + bottleneck
            v = u
        total += bottleneck


def to_dot(graph: ContactInterfaceGraph) -> str:
    """Graphviz DOT dump for debugging."""
    lines = ["graph cig {"]
    for n in graph.nodes:
        shape = "box" if n == FIXED_NODE else "ellipse"
        lines.append(f'  "{n}" [shape={shape}];')
    for e in graph.edges:
        label = ""
        if e.iid in graph.capacities:
            c = graph.capacities[e.iid]
            label = f' [label="{("inf" if math.isinf(c) else f"{c:.3g}")}"]'
        lines.append(f'  "{e.u}" -- "{e.v}"{label};')
    lines.append("}")
    return "\n".join(lines)
