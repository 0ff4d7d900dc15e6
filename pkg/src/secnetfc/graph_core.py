"""Directed acyclic network model and unit-capacity cut/flow primitives.

A network is a DAG with an ordered list of source nodes and a single sink.
Parallel edges are allowed and every edge has capacity one, so min cuts are
computed by max-flow with breadth-first augmenting paths (Edmonds-Karp).
Arc scan order follows edge declaration order, which makes every witness
cut and path decomposition deterministic.

Cuts that separate *edge sets* are reduced to node cuts by splitting each
edge into a unit-capacity arc between two endpoints:

* separating an edge set W from its upstream sources puts the unit arc
  first (tail -> mid -> head), so a path "ends at w" once it pays for w;
* separating the sink from an edge set X puts the unit arc last, so a path
  "starts at x" by paying for x before continuing downstream.

The source-side residual cut of the first problem is the unique minimum
cut closest to the sources; the sink-side residual cut of the second is
the unique one closest to the sink.  Those two extremes are what the
lattice layer calls bottoms and tops.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    CycleDetected,
    DuplicateEdgeId,
    InsufficientConnectivity,
    NodeCannotReachSink,
    ParseError,
    SinkHasOutEdge,
    SourceHasInEdge,
)

INF = 1 << 30

EdgeIds = frozenset


@dataclass(frozen=True)
class SourceProfile:
    """The (D_C, I_C, J_C) source split induced by an edge subset C."""

    d_set: frozenset[str]
    i_set: frozenset[str]
    j_set: frozenset[str]

    def is_cut_set(self) -> bool:
        return bool(self.i_set)


class Network:
    """Immutable-by-convention DAG with ordered sources and sink(s).

    Regular model networks have exactly one sink; `reverse_network` yields
    the transpose, which has the old sink as its only source and the old
    sources as sinks.  Edge ids are shared between a network and its
    reverse, and all deterministic orderings follow declaration order.
    """

    def __init__(
        self,
        edges: Sequence[tuple[str, str, str]],
        sources: Sequence[str],
        sinks: Sequence[str],
        extra_nodes: Iterable[str] = (),
    ):
        self.edges = tuple((str(e), str(t), str(h)) for e, t, h in edges)
        self.sources = tuple(str(s) for s in sources)
        self.sinks = tuple(str(t) for t in sinks)
        nodes = set(extra_nodes) | set(self.sources) | set(self.sinks)
        for _, t, h in self.edges:
            nodes.add(t)
            nodes.add(h)
        self.nodes = frozenset(nodes)
        self.edge_index: dict[str, int] = {}
        for i, (eid, _, _) in enumerate(self.edges):
            if eid in self.edge_index:
                raise DuplicateEdgeId(f"duplicate edge id {eid!r}")
            self.edge_index[eid] = i
        self._out: dict[str, list[int]] = {v: [] for v in self.nodes}
        self._in: dict[str, list[int]] = {v: [] for v in self.nodes}
        for i, (_, t, h) in enumerate(self.edges):
            self._out[t].append(i)
            self._in[h].append(i)
        self.topo_nodes = self._topological_order()

    # -- structure accessors --------------------------------------------------

    @property
    def sink(self) -> str:
        if len(self.sinks) != 1:
            raise ValueError("network has multiple sinks")
        return self.sinks[0]

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e for e, _, _ in self.edges)

    def tail(self, eid: str) -> str:
        return self.edges[self.edge_index[eid]][1]

    def head(self, eid: str) -> str:
        return self.edges[self.edge_index[eid]][2]

    def out_edges(self, v: str) -> list[str]:
        return [self.edges[i][0] for i in self._out[v]]

    def in_edges(self, v: str) -> list[str]:
        return [self.edges[i][0] for i in self._in[v]]

    def sorted_edges(self, edge_set: Iterable[str]) -> list[str]:
        return sorted(edge_set, key=self.edge_index.__getitem__)

    def topo_edges(self) -> list[str]:
        order = {v: i for i, v in enumerate(self.topo_nodes)}
        return [e for e, _, _ in sorted(self.edges, key=lambda t: (order[t[1]], self.edge_index[t[0]]))]

    def _topological_order(self) -> tuple[str, ...]:
        indeg = {v: 0 for v in self.nodes}
        for _, _, h in self.edges:
            indeg[h] += 1
        ready = deque(sorted(v for v in self.nodes if indeg[v] == 0))
        order = []
        while ready:
            v = ready.popleft()
            order.append(v)
            for i in self._out[v]:
                h = self.edges[i][2]
                indeg[h] -= 1
                if indeg[h] == 0:
                    ready.append(h)
        if len(order) != len(self.nodes):
            raise CycleDetected("graph contains a directed cycle")
        return tuple(order)

    # -- reachability ----------------------------------------------------------

    def reachable_from(self, starts: Iterable[str], removed: frozenset[str] = frozenset()) -> set[str]:
        """Nodes reachable from `starts` using edges not in `removed`."""
        seen = set(s for s in starts if s in self.nodes)
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for i in self._out[v]:
                eid, _, h = self.edges[i]
                if eid in removed or h in seen:
                    continue
                seen.add(h)
                queue.append(h)
        return seen

    def reaching(self, targets: Iterable[str], removed: frozenset[str] = frozenset()) -> set[str]:
        """Nodes from which some node of `targets` is reachable."""
        seen = set(t for t in targets if t in self.nodes)
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for i in self._in[v]:
                eid, t, _ = self.edges[i]
                if eid in removed or t in seen:
                    continue
                seen.add(t)
                queue.append(t)
        return seen


def validate_network(
    edges: Sequence[tuple[str, str, str]],
    sources: Sequence[str],
    sink: str,
    extra_nodes: Iterable[str] = (),
) -> Network:
    """Build a Network and enforce the model invariants.

    Raises CycleDetected, SourceHasInEdge, SinkHasOutEdge,
    NodeCannotReachSink or DuplicateEdgeId.
    """
    # structural checks run on the raw lists so that e.g. a sink out-edge is
    # reported as such even when it also closes a cycle
    seen_ids = set()
    for eid, tail, head in edges:
        if eid in seen_ids:
            raise DuplicateEdgeId(f"duplicate edge id {eid!r}")
        seen_ids.add(eid)
        if tail == sink:
            raise SinkHasOutEdge(f"sink {sink!r} has outgoing edge {eid!r}")
        if head in set(sources):
            raise SourceHasInEdge(f"source {head!r} has incoming edge {eid!r}")
    net = Network(edges, sources, [sink], extra_nodes)
    if len(set(net.sources)) != len(net.sources):
        raise ParseError("duplicate source declaration")
    can_reach = net.reaching([sink])
    missing = sorted(net.nodes - can_reach)
    if missing:
        raise NodeCannotReachSink(f"nodes cannot reach the sink: {missing}")
    return net


def reverse_network(net: Network) -> Network:
    """Transpose the network: same edge ids, all directions flipped.

    The sink becomes the single source and the old sources become sinks.
    Applying the operation twice restores the original edge structure.
    """
    flipped = [(e, h, t) for e, t, h in net.edges]
    return Network(flipped, net.sinks, net.sources, net.nodes)


# ---------------------------------------------------------------------------
# max flow core


class _FlowNet:
    """Tiny arc-list max-flow solver with deterministic BFS order."""

    def __init__(self):
        self.node_ids: dict = {}
        self.adj: list[list[int]] = []
        self.to: list[int] = []
        self.cap: list[int] = []
        self.arc_edge: list[str | None] = []  # original edge id for unit arcs

    def node(self, key) -> int:
        if key not in self.node_ids:
            self.node_ids[key] = len(self.adj)
            self.adj.append([])
        return self.node_ids[key]

    def arc(self, u, v, cap: int, edge_id: str | None = None) -> int:
        ui, vi = self.node(u), self.node(v)
        idx = len(self.to)
        self.to.append(vi)
        self.cap.append(cap)
        self.arc_edge.append(edge_id)
        self.adj[ui].append(idx)
        self.to.append(ui)
        self.cap.append(0)
        self.arc_edge.append(None)
        self.adj[vi].append(idx + 1)
        return idx

    def max_flow(self, s, t, limit: int = INF) -> int:
        if s not in self.node_ids or t not in self.node_ids:
            return 0
        si, ti = self.node_ids[s], self.node_ids[t]
        flow = 0
        n = len(self.adj)
        while flow < limit:
            parent = [-1] * n
            parent[si] = -2
            queue = deque([si])
            while queue:
                u = queue.popleft()
                if u == ti:
                    break
                for idx in self.adj[u]:
                    v = self.to[idx]
                    if parent[v] == -1 and self.cap[idx] > 0:
                        parent[v] = idx
                        queue.append(v)
            if parent[ti] == -1:
                break
            # unit capacities on all original arcs: augment by 1
            v = ti
            while v != si:
                idx = parent[v]
                self.cap[idx] -= 1
                self.cap[idx ^ 1] += 1
                v = self.to[idx ^ 1]
            flow += 1
        return flow

    def residual_forward_set(self, s) -> set[int]:
        if s not in self.node_ids:
            return set()
        si = self.node_ids[s]
        seen = {si}
        queue = deque([si])
        while queue:
            u = queue.popleft()
            for idx in self.adj[u]:
                v = self.to[idx]
                if v not in seen and self.cap[idx] > 0:
                    seen.add(v)
                    queue.append(v)
        return seen

    def residual_backward_set(self, t) -> set[int]:
        """Nodes that can reach t in the residual graph."""
        if t not in self.node_ids:
            return set()
        ti = self.node_ids[t]
        seen = {ti}
        queue = deque([ti])
        while queue:
            v = queue.popleft()
            for idx in self.adj[v]:
                # arc idx goes v -> to[idx]; its partner idx^1 goes to[idx] -> v.
                # u = to[idx] reaches t through v iff cap[idx^1] > 0.
                u = self.to[idx]
                if u not in seen and self.cap[idx ^ 1] > 0:
                    seen.add(u)
                    queue.append(u)
        return seen

    def source_side_cut(self, s) -> frozenset[str]:
        reach = self.residual_forward_set(s)
        cut = []
        for idx in range(0, len(self.to), 2):
            eid = self.arc_edge[idx]
            if eid is None:
                continue
            u = self.to[idx ^ 1]
            v = self.to[idx]
            if u in reach and v not in reach:
                cut.append(eid)
        return frozenset(cut)

    def sink_side_cut(self, t) -> frozenset[str]:
        reach = self.residual_backward_set(t)
        cut = []
        for idx in range(0, len(self.to), 2):
            eid = self.arc_edge[idx]
            if eid is None:
                continue
            u = self.to[idx ^ 1]
            v = self.to[idx]
            if v in reach and u not in reach:
                cut.append(eid)
        return frozenset(cut)


def _mid(eid: str):
    return ("mid", eid)


def _build_sep_edges_from_sources(
    net: Network, wiretap: Iterable[str], removed: frozenset[str] = frozenset()
) -> tuple[_FlowNet, frozenset[str]]:
    """Flow problem whose cuts separate the edge set `wiretap` from D_W.

    Unit arc comes first (tail -> mid -> head): paths end when they pay for
    a wiretap edge.  Returns (flow net, D_W).
    """
    wset = frozenset(wiretap)
    fn = _FlowNet()
    fn.node("s*")
    fn.node("t*")
    for eid, t, h in net.edges:
        if eid in removed:
            continue
        fn.arc(t, _mid(eid), 1, eid)
        fn.arc(_mid(eid), h, INF)
        if eid in wset:
            fn.arc(_mid(eid), "t*", INF)
    d_nodes = set()
    for s in net.sources:
        reach = net.reachable_from([s], removed)
        if any(net.tail(e) in reach for e in wset if e not in removed):
            d_nodes.add(s)
    d_set = frozenset(d_nodes)
    for s in d_set:
        fn.arc("s*", s, INF)
    return fn, d_set


def _build_sep_sink_from_targets(
    net: Network,
    node_targets: Iterable[str] = (),
    edge_targets: Iterable[str] = (),
    removed: frozenset[str] = frozenset(),
    sink: str | None = None,
) -> _FlowNet:
    """Flow problem whose cuts separate the sink from nodes/edges upstream.

    Unit arc comes last (tail -> mid -> head): paths starting at an edge
    target pay for that edge immediately.
    """
    fn = _FlowNet()
    fn.node("s*")
    fn.node(sink if sink is not None else net.sink)
    for eid, t, h in net.edges:
        if eid in removed:
            continue
        fn.arc(t, _mid(eid), INF)
        fn.arc(_mid(eid), h, 1, eid)
    for v in node_targets:
        fn.arc("s*", v, INF)
    for eid in edge_targets:
        if eid not in removed:
            fn.arc("s*", _mid(eid), INF)
    return fn


def source_profile(net: Network, edge_set: Iterable[str]) -> SourceProfile:
    """Compute (D_C, I_C, J_C) for an edge subset C."""
    c = frozenset(edge_set)
    for eid in c:
        if eid not in net.edge_index:
            raise ParseError(f"unknown edge id {eid!r}")
    d_set = set()
    for s in net.sources:
        reach = net.reachable_from([s])
        if any(net.tail(e) in reach for e in c):
            d_set.add(s)
    alive = net.reaching([net.sink], removed=c)
    i_set = frozenset(s for s in net.sources if s not in alive)
    d_fs = frozenset(d_set)
    return SourceProfile(d_fs, i_set, d_fs - i_set)


def mincut_node_to_node(net: Network, u_set: Iterable[str], v: str) -> tuple[int, frozenset[str]]:
    """Minimum edge cut separating node v from node set U (Menger capacity).

    The witness is the source-side minimum cut.  Capacity 0 with an empty
    witness when no path exists.
    """
    u_nodes = [u for u in u_set]
    if v in u_nodes:
        raise ParseError("target node must not belong to the separated set")
    fn = _build_sep_sink_from_targets(net, node_targets=u_nodes, sink=v)
    value = fn.max_flow("s*", v)
    return value, fn.source_side_cut("s*")


def mincut_to_edgeset(net: Network, wiretap: Iterable[str]) -> tuple[int, frozenset[str]]:
    """mincut(D_W, W): minimum cut separating edge set W from its sources.

    Witness is the source-side minimum cut; always has size <= |W| since W
    separates itself.
    """
    wset = frozenset(wiretap)
    if not wset:
        return 0, frozenset()
    fn, d_set = _build_sep_edges_from_sources(net, wset)
    if not d_set:
        return 0, frozenset()
    value = fn.max_flow("s*", "t*")
    return value, fn.source_side_cut("s*")


def edge_disjoint_paths(
    net: Network, u_set: Iterable[str], target, count: int
) -> list[list[str]]:
    """`count` pairwise edge-disjoint paths from node set U to the target.

    The target is a node or an iterable of edge ids; raises
    InsufficientConnectivity when fewer disjoint paths exist.
    """
    if count == 0:
        return []
    if isinstance(target, str):
        fn = _build_sep_sink_from_targets(net, node_targets=u_set, sink=target)
        t_key = target
    else:
        edge_targets = list(target)
        fn = _build_sep_edges_from_sources_paths(net, u_set, edge_targets)
        t_key = "t*"
    value = fn.max_flow("s*", t_key)
    if value < count:
        raise InsufficientConnectivity(f"only {value} edge-disjoint paths exist")
    return _decompose_paths(fn, t_key, count)


def _build_sep_edges_from_sources_paths(net, u_set, edge_targets):
    fn = _FlowNet()
    fn.node("s*")
    fn.node("t*")
    tset = frozenset(edge_targets)
    for eid, t, h in net.edges:
        fn.arc(t, _mid(eid), 1, eid)
        fn.arc(_mid(eid), h, INF)
        if eid in tset:
            fn.arc(_mid(eid), "t*", INF)
    for v in u_set:
        fn.arc("s*", v, INF)
    return fn


def _decompose_paths(fn: _FlowNet, t_key, count: int) -> list[list[str]]:
    """Extract unit flow paths by walking flow-carrying arcs."""
    used = [fn.cap[idx ^ 1] for idx in range(0, len(fn.to), 2)]  # forward flow
    si = fn.node_ids["s*"]
    ti = fn.node_ids[t_key]
    out_arcs = [[idx for idx in fn.adj[u] if idx % 2 == 0] for u in range(len(fn.adj))]
    paths = []
    for _ in range(count):
        path = []
        u = si
        while u != ti:
            step = None
            for idx in out_arcs[u]:
                if used[idx // 2] > 0:
                    step = idx
                    break
            assert step is not None, "flow decomposition ran out of arcs"
            used[step // 2] -= 1
            if fn.arc_edge[step] is not None:
                path.append(fn.arc_edge[step])
            u = fn.to[step]
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# text format: `source <id>` / `sink <id>` / `edge <eid> <tail> <head>`


def parse_network(text: str) -> Network:
    sources: list[str] = []
    sink: str | None = None
    edges: list[tuple[str, str, str]] = []
    nodes: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "source" and len(parts) == 2:
            sources.append(parts[1])
        elif kind == "sink" and len(parts) == 2:
            if sink is not None:
                raise ParseError(f"line {lineno}: duplicate sink declaration")
            sink = parts[1]
        elif kind == "edge" and len(parts) == 4:
            edges.append((parts[1], parts[2], parts[3]))
        elif kind == "node" and len(parts) == 2:
            nodes.append(parts[1])
        else:
            raise ParseError(f"line {lineno}: cannot parse {raw!r}")
    if sink is None:
        raise ParseError("missing sink declaration")
    if not sources:
        raise ParseError("missing source declarations")
    return validate_network(edges, sources, sink, nodes)


def format_network(net: Network) -> str:
    lines = [f"source {s}" for s in net.sources]
    lines.append(f"sink {net.sink}")
    lines.extend(f"edge {e} {t} {h}" for e, t, h in net.edges)
    return "\n".join(lines) + "\n"
