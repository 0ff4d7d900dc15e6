"""Semilattice machinery over edge subsets and the linear-case capacity bound.

Wiretap sets of size at most r fall into equivalence classes whose unique
source-side extreme (the bottom) is the residual min cut of the flow
problem separating the set from its upstream sources.  Dually, candidate
global cuts in the residual network fall into classes whose sink-side
extreme (the top) is the residual min cut toward the sink.  Minimising the
ratio |C| / Rank(T_I) over bottoms and tops reproduces the exhaustive
minimum over all valid (W, C) pairs; `bruteforce_linear_bound` is the
independent oracle for that equality.

The top-enumeration walks node subsets between the residual sources and
the sink, emitting the sink-side min cut per subset and pruning subsets
already known to map to an emitted top.  A subset is pruned only when some
processed subset inside it certifies the same min-cut value as the
covering top; that guard keeps the pruning exact regardless of traversal
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .errors import InstanceTooLarge, LevelTooLarge
from .gf_linalg import GfMatrix, rank
from .graph_core import (
    Network,
    _build_sep_edges_from_sources,
    _build_sep_sink_from_targets,
    source_profile,
)

DEFAULT_NODE_LIMIT = 20
DEFAULT_EDGE_LIMIT = 18


@dataclass(frozen=True)
class PrimaryWiretapFamily:
    """Deduplicated bottoms of the wiretap classes up to level r."""

    level: int
    members: tuple[frozenset[str], ...]
    exact_members: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class GlobalCutEntry:
    edges: frozenset[str]
    i_set: frozenset[str]


@dataclass(frozen=True)
class PrimaryGlobalCutFamily:
    """Deduplicated tops of the residual global-cut classes for one wiretap set."""

    wiretap: frozenset[str]
    members: tuple[GlobalCutEntry, ...]


@dataclass(frozen=True)
class BoundValue:
    """An exact bound value with the (W, C) pair attaining it.

    `witness_cut` lives in the residual network (edges of W removed); the
    pair re-evaluates to `value` as |C| / Rank(T_{I^W_C}), and equivalently
    (|C ∪ W| - |W|) / Rank(T_{I_{C ∪ W}}) in the original network.
    """

    value: Fraction
    witness_wiretap: frozenset[str]
    witness_cut: frozenset[str]


def primary_mincut_source_side(net: Network, wiretap: Iterable[str]) -> frozenset[str]:
    """Bottom of the wiretap set's class: the source-side residual min cut.

    It is the unique minimum cut separating W from D_W that separates every
    other minimum cut of the class from the sources.  The empty set maps to
    itself.
    """
    wset = frozenset(wiretap)
    if not wset:
        return frozenset()
    fn, d_set = _build_sep_edges_from_sources(net, wset)
    if not d_set:
        return frozenset()
    fn.max_flow("s*", "t*")
    return fn.source_side_cut("s*")


def primary_mincut_sink_side(
    net: Network, cut: Iterable[str], removed: frozenset[str] = frozenset()
) -> frozenset[str]:
    """Top of the cut's class: the sink-side residual min cut separating the
    sink from the region that `cut` disconnects, inside the network with
    `removed` deleted.

    Working with the disconnected node region rather than the raw edge set
    strips edges of `cut` that sever nothing, so equivalent cut sets share
    one canonical top; a cut that disconnects nothing maps to the empty
    set.
    """
    sink = net.sink
    cset = frozenset(e for e in cut if e not in removed)
    live = net.reaching([sink], removed)
    still = net.reaching([sink], removed | cset)
    region = [v for v in live if v != sink and v not in still]
    if not region:
        return frozenset()
    fn = _build_sep_sink_from_targets(net, node_targets=region, removed=removed, sink=sink)
    fn.max_flow("s*", sink)
    return fn.sink_side_cut(sink)


def enumerate_primary_wiretaps(net: Network, level: int) -> PrimaryWiretapFamily:
    """All distinct bottoms of wiretap sets of size <= level (the reduced
    search space for the outer minimum)."""
    n_edges = len(net.edges)
    if level < 0 or level > n_edges:
        raise LevelTooLarge(f"security level {level} outside [0, {n_edges}]")
    seen: set[frozenset[str]] = set()
    members: list[frozenset[str]] = []
    ids = net.edge_ids
    for size in range(level + 1):
        for combo in combinations(ids, size):
            bottom = primary_mincut_source_side(net, combo)
            if bottom not in seen:
                seen.add(bottom)
                members.append(bottom)
    order = net.edge_index.__getitem__
    members.sort(key=lambda w: (len(w), sorted(map(order, w))))
    exact = tuple(w for w in members if len(w) == level)
    return PrimaryWiretapFamily(level, tuple(members), exact)


def _sources_cut_off(net: Network, removed: frozenset[str]) -> frozenset[str]:
    alive = net.reaching([net.sink], removed)
    return frozenset(s for s in net.sources if s not in alive)


def primary_global_cuts(
    net: Network, wiretap: Iterable[str], node_limit: int = DEFAULT_NODE_LIMIT
) -> PrimaryGlobalCutFamily:
    """All distinct tops of global-cut classes in the residual network.

    Targets are node subsets N with D_W <= N inside the region that still
    reaches the sink; each yields the sink-side residual min cut.  Subsets
    covered by an emitted top are pruned once a processed subset inside
    them certifies the matching min-cut value, which is exactly the
    condition under which their top coincides with the emitted one.
    """
    wset = frozenset(wiretap)
    sink = net.sink
    d_set = source_profile(net, wset).d_set if wset else frozenset()
    live = net.reaching([sink], wset)
    u0 = frozenset(s for s in net.sources if s not in live)

    members: dict[frozenset[str], frozenset[str]] = {}
    if u0 and d_set <= u0:
        # no live edge is needed to sever the already-dead sources
        members[frozenset()] = u0

    # dead sources of D_W sit in u0 and are severed for free; the live ones
    # must belong to every enumerated node subset
    live_d = sorted(s for s in d_set if s in live)
    free = sorted(
        (v for v in live if v != sink and v not in d_set),
        key=lambda v: (0 if v in net.sources else 1, v),
    )
    if len(live) - 1 > node_limit:
        raise InstanceTooLarge(
            f"{len(live) - 1} candidate nodes exceed the enumeration limit {node_limit}"
        )

    bit = {v: 1 << i for i, v in enumerate(free)}
    emitted: list[tuple[int, int]] = []  # (covered node mask, cut size)
    seen_tops: set[frozenset[str]] = set()
    processed: list[tuple[int, int]] = []  # (node mask, mincut value)

    def consider(n_nodes: list[str], n_mask: int) -> None:
        lower = 0
        for mask, f in processed:
            if f > lower and mask & n_mask == mask:
                lower = f
        for covered, size in emitted:
            if lower >= size and n_mask & covered == n_mask:
                processed.append((n_mask, size))
                return
        fn = _build_sep_sink_from_targets(net, node_targets=n_nodes, removed=wset, sink=sink)
        value = fn.max_flow("s*", sink)
        top = fn.sink_side_cut(sink)
        still_alive = net.reaching([sink], wset | top)
        covered = 0
        for v in free:
            if v not in still_alive:
                covered |= bit[v]
        processed.append((n_mask, value))
        if top not in seen_tops:
            seen_tops.add(top)
            emitted.append((covered, value))
            i_set = u0 | frozenset(s for s in net.sources if s not in still_alive)
            if i_set:
                members[top] = i_set

    for size in range(len(free) + 1):
        if size == 0 and not live_d:
            continue
        for combo in combinations(free, size):
            mask = 0
            for v in combo:
                mask |= bit[v]
            consider(live_d + list(combo), mask)

    order = net.edge_index.__getitem__
    entries = [GlobalCutEntry(edges, i_set) for edges, i_set in members.items()]
    entries.sort(key=lambda m: (len(m.edges), sorted(map(order, m.edges))))
    return PrimaryGlobalCutFamily(wset, tuple(entries))


def primary_global_cuts_oracle(
    net: Network, wiretap: Iterable[str], edge_limit: int = DEFAULT_EDGE_LIMIT
) -> PrimaryGlobalCutFamily:
    """Brute-force reference: map every valid residual cut set to its top.

    Enumerates all edge subsets of the residual network with
    D_W <= I^W_C != {} and deduplicates their sink-side min cuts.  Output
    must match `primary_global_cuts` as a set on any instance both can
    process.
    """
    wset = frozenset(wiretap)
    rest = [e for e in net.edge_ids if e not in wset]
    if len(rest) > edge_limit:
        raise InstanceTooLarge(f"{len(rest)} residual edges exceed the oracle limit {edge_limit}")
    d_set = source_profile(net, wset).d_set if wset else frozenset()
    members: dict[frozenset[str], frozenset[str]] = {}
    for size in range(len(rest) + 1):
        for combo in combinations(rest, size):
            removed = wset | frozenset(combo)
            i_set = _sources_cut_off(net, removed)
            if not i_set or not d_set <= i_set:
                continue
            top = primary_mincut_sink_side(net, combo, wset)
            if top not in members:
                members[top] = _sources_cut_off(net, wset | top)
    order = net.edge_index.__getitem__
    entries = [GlobalCutEntry(edges, i_set) for edges, i_set in members.items()]
    entries.sort(key=lambda m: (len(m.edges), sorted(map(order, m.edges))))
    return PrimaryGlobalCutFamily(wset, tuple(entries))


def _rank_cache(net: Network, coeffs: GfMatrix):
    cache: dict[frozenset[str], int] = {}
    row_of = {s: i for i, s in enumerate(net.sources)}

    def rank_of(i_set: frozenset[str]) -> int:
        got = cache.get(i_set)
        if got is None:
            rows = sorted(row_of[s] for s in i_set)
            got = rank(coeffs.submatrix(rows, range(coeffs.cols))) if rows else 0
            cache[i_set] = got
        return got

    return rank_of


def _witness_key(net: Network, edges: frozenset[str]):
    return sorted(net.edge_index[e] for e in edges)


def omega(
    net: Network,
    wiretap: Iterable[str],
    coeffs: GfMatrix,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> BoundValue | None:
    """Omega(W): min |C| / Rank(T_{I^W_C}) over the top family of W.

    None when no member constrains the rate, which can only happen if the
    coefficient matrix has all-zero rows (callers are expected to
    preprocess those away).
    """
    wset = frozenset(wiretap)
    family = primary_global_cuts(net, wset, node_limit)
    rank_of = _rank_cache(net, coeffs)
    best = None
    for entry in family.members:
        rk = rank_of(entry.i_set)
        if rk == 0:
            continue  # a vanishing-rank cut imposes no constraint
        key = (Fraction(len(entry.edges), rk), _witness_key(net, entry.edges))
        if best is None or key < best[0]:
            best = (key, entry)
    if best is None:
        return None
    return BoundValue(best[0][0], wset, best[1].edges)


def algorithm2_bound(
    net: Network,
    coeffs: GfMatrix,
    level: int,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> BoundValue:
    """Upper bound on the secure computing capacity for linear targets:
    min over primary wiretap sets W of Omega(W), as an exact rational."""
    family = enumerate_primary_wiretaps(net, level)
    best: tuple | None = None
    for wset in family.members:
        cand = omega(net, wset, coeffs, node_limit)
        if cand is None:
            continue
        key = (cand.value, _witness_key(net, cand.witness_wiretap), _witness_key(net, cand.witness_cut))
        if best is None or key < best[0]:
            best = (key, cand)
    if best is None:
        raise InstanceTooLarge("no wiretap set admits a constraining cut")
    return best[1]


def bruteforce_linear_bound(
    net: Network,
    coeffs: GfMatrix,
    level: int,
    edge_limit: int = DEFAULT_EDGE_LIMIT,
) -> BoundValue:
    """Exhaustive oracle for the linear-case bound.

    Minimises (|C| - |W|) / Rank(T_{I_C}) over all pairs with W <= C,
    |W| <= level and D_W <= I_C.  Subset sizes are scanned in ascending
    order and the scan stops once (size - level) / Rank(T) can no longer
    beat the incumbent, which is exact because the ratio lower bound is
    monotone in |C|.  The witness is reported in residual terms (C minus
    W), matching `algorithm2_bound`.
    """
    ids = net.edge_ids
    if level < 0:
        raise LevelTooLarge("security level must be nonnegative")
    if len(ids) > edge_limit:
        raise InstanceTooLarge(f"{len(ids)} edges exceed the configured limit {edge_limit}")
    rank_of = _rank_cache(net, coeffs)
    full_rank = rank(coeffs)
    d_of_edge: dict[str, frozenset[str]] = {}
    for s in net.sources:
        reach = net.reachable_from([s])
        for eid, t, _ in net.edges:
            if t in reach:
                d_of_edge.setdefault(eid, frozenset())
                d_of_edge[eid] |= {s}
    for eid in ids:
        d_of_edge.setdefault(eid, frozenset())

    best: tuple | None = None
    for size in range(1, len(ids) + 1):
        if best is not None and Fraction(size - level, full_rank) >= best[0][0]:
            break
        for combo in combinations(ids, size):
            cset = frozenset(combo)
            i_set = _sources_cut_off(net, cset)
            if not i_set:
                continue
            rk = rank_of(i_set)
            if rk == 0:
                continue
            admissible = [e for e in combo if d_of_edge[e] <= i_set]
            w = min(level, len(admissible))
            wset = frozenset(admissible[:w])
            value = Fraction(size - w, rk)
            key = (value, _witness_key(net, cset), _witness_key(net, wset))
            if best is None or key < best[0]:
                best = (key, wset, cset)
    if best is None:
        raise InstanceTooLarge("network has no cut set")
    _, wset, cset = best
    return BoundValue(best[0][0], wset, cset - wset)
