import random
from itertools import combinations

import pytest

from secnetfc import graph_core as gc
from secnetfc.errors import (
    CycleDetected,
    DuplicateEdgeId,
    InsufficientConnectivity,
    NodeCannotReachSink,
    ParseError,
    SinkHasOutEdge,
    SourceHasInEdge,
)
from conftest import random_dag


def test_validate_fixture_networks(butterfly_net, layered_net):
    assert len(butterfly_net.edges) == 9
    assert butterfly_net.sources == ("s1", "s2")
    assert len(layered_net.edges) == 21
    assert layered_net.sink == "rho"


def test_validate_minimal_network():
    net = gc.validate_network([("e1", "s", "t")], ["s"], "t")
    assert net.sources == ("s",)


def test_validation_errors():
    # an edge out of the sink is reported as such even though it also
    # closes a cycle with the source's path
    with pytest.raises(SinkHasOutEdge):
        gc.validate_network([("e1", "s", "t"), ("e2", "t", "s")], ["s"], "t")
    with pytest.raises(SourceHasInEdge):
        gc.validate_network(
            [("e1", "s", "v"), ("e2", "v", "s2"), ("e3", "s2", "t"), ("e4", "v", "t")],
            ["s", "s2"],
            "t",
        )
    with pytest.raises(CycleDetected):
        gc.validate_network(
            [("e1", "s", "a"), ("e2", "a", "b"), ("e3", "b", "a"), ("e4", "a", "t")],
            ["s"],
            "t",
        )
    with pytest.raises(NodeCannotReachSink):
        gc.validate_network([("e1", "s", "t"), ("e2", "s", "v")], ["s"], "t")
    with pytest.raises(DuplicateEdgeId):
        gc.validate_network([("e1", "s", "t"), ("e1", "s", "t")], ["s"], "t")


def test_source_profile_sink_cut(layered_net):
    prof = gc.source_profile(layered_net, ["e19", "e20", "e21"])
    assert prof.i_set == prof.d_set == frozenset(["s1", "s2", "s3"])
    assert prof.j_set == frozenset()


def test_source_profile_butterfly_sink(butterfly_net):
    prof = gc.source_profile(butterfly_net, ["a8", "a9"])
    assert prof.i_set == frozenset(["s1", "s2"]) == prof.d_set


def test_source_profile_empty(layered_net):
    prof = gc.source_profile(layered_net, [])
    assert prof == gc.SourceProfile(frozenset(), frozenset(), frozenset())


def test_source_profile_random_against_bfs_oracle():
    rng = random.Random(42)
    for _ in range(25):
        net = random_dag(rng)
        edges = list(net.edge_ids)
        for _ in range(4):
            c = frozenset(rng.sample(edges, rng.randint(0, min(4, len(edges)))))
            prof = gc.source_profile(net, c)
            # independent per-source recomputation
            for s in net.sources:
                reach = net.reachable_from([s])
                in_d = any(net.tail(e) in reach for e in c)
                assert (s in prof.d_set) == in_d
                alive = s in net.reaching([net.sink], removed=c)
                assert (s in prof.i_set) == (not alive)
            assert prof.i_set <= prof.d_set
            assert prof.j_set == prof.d_set - prof.i_set


def test_mincut_node_to_node_values(layered_net):
    value, witness = gc.mincut_node_to_node(layered_net, ["s1", "s2", "s3"], "rho")
    assert value == 3
    # removing the witness kills reachability
    assert "rho" not in gc.Network.reachable_from(layered_net, ["s1", "s2", "s3"], witness)
    for s in layered_net.sources:
        assert gc.mincut_node_to_node(layered_net, [s], "rho")[0] == 3


def test_mincut_single_edge():
    net = gc.validate_network([("e1", "s", "t")], ["s"], "t")
    assert gc.mincut_node_to_node(net, ["s"], "t") == (1, frozenset(["e1"]))


def test_mincut_no_path():
    net = gc.validate_network(
        [("e1", "s1", "t"), ("e2", "s2", "t")], ["s1", "s2"], "t"
    )
    # s1 cannot be reached from s2's side: separate a mid node instead
    value, witness = gc.mincut_node_to_node(net, ["s2"], "t")
    assert value == 1 and witness == frozenset(["e2"])


def _bruteforce_mincut_nodes(net, u_set, v):
    ids = list(net.edge_ids)
    for size in range(len(ids) + 1):
        for combo in combinations(ids, size):
            removed = frozenset(combo)
            if v not in net.reachable_from(u_set, removed):
                return size
    raise AssertionError("sink always reachable?")


def test_mincut_random_against_subset_enumeration():
    rng = random.Random(7)
    for _ in range(20):
        net = random_dag(rng, max_edges=10)
        value, witness = gc.mincut_node_to_node(net, list(net.sources), net.sink)
        assert value == _bruteforce_mincut_nodes(net, list(net.sources), net.sink)
        assert len(witness) == value
        assert net.sink not in net.reachable_from(net.sources, witness)


def test_mincut_to_edgeset_cases(layered_net):
    value, witness = gc.mincut_to_edgeset(layered_net, ["e10"])
    assert value == 1 and witness == frozenset(["e10"])
    # a downstream copy has the same bottleneck
    value, witness = gc.mincut_to_edgeset(layered_net, ["e13"])
    assert value == 1 and witness == frozenset(["e10"])
    assert gc.mincut_to_edgeset(layered_net, []) == (0, frozenset())


def test_mincut_to_edgeset_parallel_source_edges():
    net = gc.validate_network(
        [("e1", "s", "v"), ("e2", "s", "v"), ("e3", "v", "t")], ["s"], "t"
    )
    value, witness = gc.mincut_to_edgeset(net, ["e1", "e2"])
    assert value == 2 and witness == frozenset(["e1", "e2"])


def test_mincut_to_edgeset_never_exceeds_size():
    rng = random.Random(13)
    for _ in range(15):
        net = random_dag(rng)
        edges = list(net.edge_ids)
        w = frozenset(rng.sample(edges, rng.randint(1, min(3, len(edges)))))
        value, witness = gc.mincut_to_edgeset(net, w)
        assert value <= len(w)
        assert len(witness) == value


def test_edge_disjoint_paths_layered(layered_net):
    paths = gc.edge_disjoint_paths(layered_net, ["s1", "s2", "s3"], "rho", 3)
    assert len(paths) == 3
    used = [e for p in paths for e in p]
    assert len(used) == len(set(used))
    for p in paths:
        assert layered_net.head(p[-1]) == "rho"
        for a, b in zip(p, p[1:]):
            assert layered_net.head(a) == layered_net.tail(b)


def test_edge_disjoint_paths_zero_and_errors(layered_net):
    assert gc.edge_disjoint_paths(layered_net, ["s1"], "rho", 0) == []
    with pytest.raises(InsufficientConnectivity):
        gc.edge_disjoint_paths(layered_net, ["s1"], "rho", 4)


def test_edge_disjoint_paths_menger_equality():
    rng = random.Random(23)
    for _ in range(15):
        net = random_dag(rng)
        value, _ = gc.mincut_node_to_node(net, list(net.sources), net.sink)
        paths = gc.edge_disjoint_paths(net, list(net.sources), net.sink, value)
        assert len(paths) == value
        used = [e for p in paths for e in p]
        assert len(used) == len(set(used))


def test_reverse_network_involution(butterfly_net):
    rev = gc.reverse_network(butterfly_net)
    assert rev.sources == ("rho",)
    assert set(rev.sinks) == {"s1", "s2"}
    back = gc.reverse_network(rev)
    assert back.edges == butterfly_net.edges
    assert back.sources == butterfly_net.sources


def test_reverse_single_edge():
    net = gc.validate_network([("e1", "s", "t")], ["s"], "t")
    rev = gc.reverse_network(net)
    assert rev.tail("e1") == "t" and rev.head("e1") == "s"


def test_network_text_roundtrip(layered_net):
    text = gc.format_network(layered_net)
    again = gc.parse_network(text)
    assert again.edges == layered_net.edges
    assert again.sources == layered_net.sources
    assert again.sink == layered_net.sink


def test_network_parse_errors():
    with pytest.raises(ParseError):
        gc.parse_network("edge e1 a b\nsink b\n")  # no sources
    with pytest.raises(ParseError):
        gc.parse_network("source a\nedge e1 a b\n")  # no sink
    with pytest.raises(ParseError):
        gc.parse_network("source a\nsink b\nfrob e1\n")
