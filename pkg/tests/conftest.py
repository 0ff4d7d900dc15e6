"""Shared fixtures: the two hand-built example codes and a random DAG pool."""

from pathlib import Path

import pytest

from secnetfc import code_builder as cb
from secnetfc import gf_linalg as gl
from secnetfc.graph_core import Network, parse_network, validate_network
from secnetfc.verifier import TabularCode

DATA = Path(__file__).parent / "data"


def load_net(name: str) -> Network:
    return parse_network((DATA / name).read_text())


@pytest.fixture(scope="session")
def butterfly_net() -> Network:
    return load_net("fig_reverse_butterfly.net")


@pytest.fixture(scope="session")
def layered_net() -> Network:
    return load_net("fig_three_source.net")


@pytest.fixture(scope="session")
def layered_coeffs() -> gl.GfMatrix:
    return gl.parse_matrix((DATA / "target_three_source.mat").read_text())


@pytest.fixture(scope="session")
def layered_upsilon() -> gl.GfMatrix:
    return gl.parse_matrix((DATA / "security_three_source.mat").read_text())


# hand-built (3,1) base code on the layered network: sources inject the
# published vectors, every interior node forwards the sum of its inputs
LAYERED_SOURCE_VECTORS = {
    "e1": [2, 2, 1],
    "e2": [0, 1, 0],
    "e3": [1, 0, 0],
    "e4": [0, 0, 1],
    "e5": [2, 1, 2],
    "e6": [1, 0, 0],
    "e7": [0, 0, 2],
    "e8": [0, 2, 0],
    "e9": [2, 1, 1],
}

PUBLISHED_BASE_GLOBALS = {
    "e1": [2, 2, 1, 0, 0, 0, 0, 0, 0],
    "e2": [0, 1, 0, 0, 0, 0, 0, 0, 0],
    "e3": [1, 0, 0, 0, 0, 0, 0, 0, 0],
    "e4": [0, 0, 0, 0, 0, 1, 0, 0, 0],
    "e5": [0, 0, 0, 2, 1, 2, 0, 0, 0],
    "e6": [0, 0, 0, 1, 0, 0, 0, 0, 0],
    "e7": [0, 0, 0, 0, 0, 0, 0, 0, 2],
    "e8": [0, 0, 0, 0, 0, 0, 0, 2, 0],
    "e9": [0, 0, 0, 0, 0, 0, 2, 1, 1],
    "e10": [0, 1, 0, 0, 0, 1, 0, 0, 0],
    "e11": [1, 0, 0, 0, 0, 0, 0, 0, 2],
    "e12": [0, 0, 0, 1, 0, 0, 0, 2, 0],
    "e13": [0, 1, 0, 0, 0, 1, 0, 0, 0],
    "e14": [0, 1, 0, 0, 0, 1, 0, 0, 0],
    "e15": [1, 0, 0, 0, 0, 0, 0, 0, 2],
    "e16": [1, 0, 0, 0, 0, 0, 0, 0, 2],
    "e17": [0, 0, 0, 1, 0, 0, 0, 2, 0],
    "e18": [0, 0, 0, 1, 0, 0, 0, 2, 0],
    "e19": [0, 0, 1, 0, 0, 1, 0, 0, 2],
    "e20": [0, 1, 0, 0, 1, 0, 0, 2, 0],
    "e21": [1, 0, 0, 1, 0, 0, 2, 0, 0],
}

PUBLISHED_SECURE_GLOBALS = {
    "e1": [2, 1, 2, 0, 0, 0, 0, 0, 0],
    "e2": [0, 0, 1, 0, 0, 0, 0, 0, 0],
    "e3": [1, 0, 2, 0, 0, 0, 0, 0, 0],
    "e4": [0, 0, 0, 0, 1, 2, 0, 0, 0],
    "e5": [0, 0, 0, 2, 2, 0, 0, 0, 0],
    "e6": [0, 0, 0, 1, 0, 2, 0, 0, 0],
    "e7": [0, 0, 0, 0, 0, 0, 0, 2, 1],
    "e8": [0, 0, 0, 0, 0, 0, 0, 0, 2],
    "e9": [0, 0, 0, 0, 0, 0, 2, 1, 1],
    "e10": [0, 0, 1, 0, 1, 2, 0, 0, 0],
    "e11": [1, 0, 2, 0, 0, 0, 0, 2, 1],
    "e12": [0, 0, 0, 1, 0, 2, 0, 0, 2],
    "e13": [0, 0, 1, 0, 1, 2, 0, 0, 0],
    "e14": [0, 0, 1, 0, 1, 2, 0, 0, 0],
    "e15": [1, 0, 2, 0, 0, 0, 0, 2, 1],
    "e16": [1, 0, 2, 0, 0, 0, 0, 2, 1],
    "e17": [0, 0, 0, 1, 0, 2, 0, 0, 2],
    "e18": [0, 0, 0, 1, 0, 2, 0, 0, 2],
    "e19": [0, 1, 2, 0, 1, 2, 0, 2, 1],
    "e20": [0, 0, 1, 0, 0, 1, 0, 0, 2],
    "e21": [1, 0, 2, 1, 0, 2, 2, 0, 1],
}

TRANSFORM_BLOCK = [[1, 0, 0], [0, 0, 1], [2, 1, 2]]


def build_layered_base(net: Network, coeffs: gl.GfMatrix) -> cb.LinearSecureCode:
    fs = coeffs.field
    source_locals = {
        e: gl.GfMatrix.column(fs, v) for e, v in LAYERED_SOURCE_VECTORS.items()
    }
    one = gl.GfMatrix(fs, [[1]])
    hop_locals = {}
    sources = set(net.sources)
    for eid, tail, _ in net.edges:
        if tail in sources:
            continue
        for d in net.in_edges(tail):
            hop_locals[(d, eid)] = one
    params = cb.CodeParameters(fs, 3, 1, 3, 0, cb.network_mincut(net))
    globals_ = cb.propagate_globals(net, params, source_locals, hop_locals)
    code = cb.LinearSecureCode(net, params, source_locals, hop_locals, globals_, None, None)
    code.decode_target = gl.kron(coeffs, gl.GfMatrix.identity(fs, 3))
    code.decoder = gl.solve_right(code.g_sink(), code.decode_target)
    assert code.decoder is not None
    return code


@pytest.fixture(scope="session")
def layered_base(layered_net, layered_coeffs) -> cb.LinearSecureCode:
    return build_layered_base(layered_net, layered_coeffs)


@pytest.fixture(scope="session")
def layered_secure(layered_net, layered_coeffs, layered_base) -> cb.LinearSecureCode:
    fs = layered_coeffs.field
    block = gl.GfMatrix(fs, TRANSFORM_BLOCK)
    params = cb.CodeParameters(fs, 3, 1, 3, 1, layered_base.params.c_min)
    return cb.apply_transform(
        layered_base, cb.TransformMatrix((block,) * 3), params, layered_coeffs
    )


# the hand code on the reverse butterfly: symbols live in the order-2 unit
# group of GF(3), encoded as indices {0, 1} (symbol value = index + 1)


def _u(index: int) -> int:
    return index + 1


def _idx(value: int) -> int:
    return value % 3 - 1


def _gmul(*indices: int) -> int:
    prod = 1
    for i in indices:
        prod = (prod * _u(i)) % 3
    return _idx(prod)


def build_butterfly_code(net: Network) -> TabularCode:
    source_tables = {
        "a1": lambda m, k: k,
        "a2": lambda m, k: _gmul(m, k),
        "a3": lambda m, k: _gmul(m, k),
        "a4": lambda m, k: k,
    }
    hop_tables = {
        "a5": lambda y2, y3: _gmul(y2, y3),
        "a6": lambda y5: y5,
        "a7": lambda y5: y5,
        # the unit group has exponent two, so dividing equals multiplying
        "a8": lambda y1, y6: _gmul(y1, y6),
        "a9": lambda y4, y7: y4,
    }
    decoder = lambda y8, y9: _gmul(y8, y9)
    return TabularCode(
        net,
        message_sizes=(2, 2),
        key_sizes=(2, 2),
        edge_alphabet=2,
        source_tables=source_tables,
        hop_tables=hop_tables,
        decoder=decoder,
    )


@pytest.fixture(scope="session")
def butterfly_code(butterfly_net) -> TabularCode:
    return build_butterfly_code(butterfly_net)


# deterministic random-DAG pool shared by the property suites


def random_dag(rng, max_edges=12, max_sources=3, max_mids=4, max_degree=2) -> Network:
    while True:
        s = rng.randint(1, max_sources)
        t = rng.randint(0, max_mids)
        sources = [f"s{i}" for i in range(1, s + 1)]
        mids = [f"v{i}" for i in range(1, t + 1)]
        order = sources + mids + ["rho"]
        edges = []
        eid = 0
        for i, u in enumerate(order[:-1]):
            later = [x for x in order[i + 1 :] if x not in sources] or ["rho"]
            for _ in range(rng.randint(1, max_degree)):
                eid += 1
                edges.append((f"e{eid}", u, rng.choice(later)))
        if len(edges) <= max_edges:
            try:
                return validate_network(edges, sources, "rho")
            except Exception:
                continue


def random_coeffs(rng, fs: gl.FieldSpec, rows: int, cols: int | None = None) -> gl.GfMatrix:
    """Random full-column-rank coefficient matrix without zero rows."""
    k = cols if cols is not None else rng.randint(1, rows)
    while True:
        data = [[rng.randrange(fs.q) for _ in range(k)] for _ in range(rows)]
        m = gl.GfMatrix(fs, data)
        if gl.rank(m) == k and all(any(row) for row in data):
            return m
