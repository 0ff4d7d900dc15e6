"""Construction of linear secure network codes for vector-linear targets.

Pipeline: build a rate-R multicast code on the reversed network by random
linear coding (verified per sink, retried under a seeded budget), reverse
it into a rate-R code computing the algebraic sum, scale per source row to
compute each column of the coefficient matrix, and stack the k column
codes over k network uses.  A block-diagonal invertible transform then
trades rk coordinates per source for uniform keys; choosing it via the
sequential subspace-avoidance scheme is guaranteed to succeed whenever the
field order exceeds s times the number of exact-level primary wiretap
sets, and a seeded randomized search covers smaller fields.

Code reversal uses transpose duality: the reversed code's hop coefficient
from in-edge d to out-edge e equals the forward coefficient from reversed
e to reversed d, each source injects the transposed rows of its multicast
decoder, and the sink decodes the sum through the transposed injection
matrix of the forward source.  Nothing is assumed of this duality beyond
what the decoder solve and the verifier re-check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    FieldTooSmall,
    MulticastConstructionFailed,
    NotFullColumnRank,
    RateExceedsMincut,
    SearchExhausted,
    SecnetfcError,
    SecurityLevelTooHigh,
    ShapeError,
)
from .gf_linalg import (
    FieldSpec,
    GfMatrix,
    block_diag,
    column_span_contains,
    hstack_all,
    inverse,
    kron,
    rank,
    solve_right,
    subspaces_intersect_trivially,
    vstack_all,
)
from .graph_core import Network, mincut_node_to_node, reverse_network, validate_network

DEFAULT_RETRIES = 64


@dataclass(frozen=True)
class CodeParameters:
    """Shape parameters of an (ell, n) linear secure network code."""

    field: FieldSpec
    num_sources: int
    k: int
    rate_r: int  # R, with rk <= R <= C_min
    level: int  # security level r
    c_min: int

    @property
    def keys(self) -> int:
        return self.level * self.k

    @property
    def ell(self) -> int:
        return self.rate_r - self.keys

    @property
    def block(self) -> int:
        return self.k


@dataclass
class LinearSecureCode:
    """Local coefficient matrices plus derived globals and sink decoder.

    Per source-adjacent edge: A (R x n) applied to the source's (message,
    key) row.  Per other edge: one n x n matrix per in-edge of its tail.
    Global matrices stack all sources: (R*s) x n per edge.  The decoder D
    satisfies y_In(rho) . D = x_S . decode_target.
    """

    net: Network
    params: CodeParameters
    source_locals: dict[str, GfMatrix]
    hop_locals: dict[tuple[str, str], GfMatrix]
    globals_: dict[str, GfMatrix]
    decoder: GfMatrix | None
    decode_target: GfMatrix | None

    def source_of_edge(self, eid: str) -> int | None:
        tail = self.net.tail(eid)
        try:
            return self.net.sources.index(tail)
        except ValueError:
            return None

    def g_of(self, edges) -> GfMatrix:
        """Horizontal stack of global matrices, in edge declaration order."""
        ordered = self.net.sorted_edges(edges)
        fs = self.params.field
        if not ordered:
            return GfMatrix.zeros(fs, self.params.rate_r * self.params.num_sources, 0)
        return hstack_all([self.globals_[e] for e in ordered])

    def g_sink(self) -> GfMatrix:
        return self.g_of(self.net.in_edges(self.net.sink))

    def source_block(self, mat: GfMatrix, i: int) -> GfMatrix:
        return mat.row_block(i * self.params.rate_r, self.params.rate_r)

    def recompute_globals(self) -> dict[str, GfMatrix]:
        return propagate_globals(self.net, self.params, self.source_locals, self.hop_locals)


def propagate_globals(
    net: Network,
    params: CodeParameters,
    source_locals: dict[str, GfMatrix],
    hop_locals: dict[tuple[str, str], GfMatrix],
) -> dict[str, GfMatrix]:
    """Run the local-encoding recursion symbolically in topological order."""
    fs = params.field
    rows = params.rate_r * params.num_sources
    src_index = {s: i for i, s in enumerate(net.sources)}
    out: dict[str, GfMatrix] = {}
    for eid in net.topo_edges():
        tail = net.tail(eid)
        g = GfMatrix.zeros(fs, rows, params.block)
        if tail in src_index:
            i = src_index[tail]
            loc = source_locals[eid]
            for rr in range(params.rate_r):
                g.data[i * params.rate_r + rr] = list(loc.data[rr])
        else:
            for d in net.in_edges(tail):
                g = g + (out[d] @ hop_locals[(d, eid)])
        out[eid] = g
    return out


def network_mincut(net: Network) -> int:
    """C_min: the smallest cut-set size, i.e. the cheapest single source."""
    return min(mincut_node_to_node(net, [s], net.sink)[0] for s in net.sources)


def preprocess_target(coeffs: GfMatrix, net: Network) -> tuple[GfMatrix, Network]:
    """Drop all-zero coefficient rows together with their source nodes.

    The secure computing capacity is invariant under the removal; the
    surviving matrix must have full column rank.
    """
    if coeffs.rows != len(net.sources):
        raise ShapeError("coefficient matrix must have one row per source")
    keep = [i for i, row in enumerate(coeffs.data) if any(row)]
    if len(keep) == coeffs.rows:
        trimmed_net = net
        trimmed = coeffs
    else:
        dropped = {net.sources[i] for i in range(coeffs.rows) if i not in keep}
        edges = [(e, t, h) for e, t, h in net.edges if t not in dropped]
        sources = [s for s in net.sources if s not in dropped]
        trimmed_net = validate_network(edges, sources, net.sink)
        trimmed = coeffs.submatrix(keep, range(coeffs.cols))
    if rank(trimmed) != trimmed.cols:
        raise NotFullColumnRank("coefficient matrix does not have full column rank")
    return trimmed, trimmed_net


def build_base_code(
    net: Network,
    coeffs: GfMatrix,
    rate_r: int,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> LinearSecureCode:
    """Admissible (R, k) function-computing code with no keys in use.

    Random linear multicast on the reversed network, verified to have rank
    R at every reversed sink, then transposed back and scaled columnwise by
    the coefficient matrix.
    """
    fs = coeffs.field
    s = len(net.sources)
    if coeffs.rows != s:
        raise ShapeError("coefficient matrix must have one row per source")
    k = coeffs.cols
    c_min = network_mincut(net)
    if rate_r > c_min:
        raise RateExceedsMincut(f"rate {rate_r} exceeds C_min = {c_min}")
    if rate_r < 1:
        raise RateExceedsMincut("rate must be at least 1")
    rev = reverse_network(net)
    rng = random.Random(seed)
    q = fs.q

    for attempt in range(retries):
        # odd attempts bias toward nonzero hop coefficients and a basis
        # injection, which succeeds fast on layered topologies at small q;
        # even attempts sample uniformly so nothing is ever excluded
        biased = attempt % 2 == 1
        u: dict[str, GfMatrix] = {}
        coef: dict[tuple[str, str], int] = {}
        injected = 0
        for eid in rev.topo_edges():
            tail = rev.tail(eid)
            if tail == net.sink:
                if biased and injected < rate_r:
                    vec = [0] * rate_r
                    vec[injected] = 1
                    u[eid] = GfMatrix.column(fs, vec)
                else:
                    u[eid] = GfMatrix.column(fs, [rng.randrange(q) for _ in range(rate_r)])
                injected += 1
            else:
                vec = GfMatrix.zeros(fs, rate_r, 1)
                for d in rev.in_edges(tail):
                    c = rng.randrange(1, q) if biased else rng.randrange(q)
                    coef[(d, eid)] = c
                    if c:
                        vec = vec + u[d].scale(c)
                u[eid] = vec
        decoders: list[GfMatrix] = []
        ok = True
        for src in net.sources:
            cols = rev.in_edges(src)  # = Out(src) in the forward network
            u_i = hstack_all([u[e] for e in cols])
            d_i = solve_right(u_i, GfMatrix.identity(fs, rate_r))
            if d_i is None:
                ok = False
                break
            decoders.append(d_i)
        if not ok:
            continue

        source_locals: dict[str, GfMatrix] = {}
        for i, src in enumerate(net.sources):
            row_of = {e: pos for pos, e in enumerate(rev.in_edges(src))}
            t_row = GfMatrix(fs, [coeffs.data[i]])
            for eid in net.out_edges(src):
                inject = GfMatrix.column(fs, decoders[i].data[row_of[eid]])
                source_locals[eid] = inject @ t_row  # (R x 1)(1 x k)
        hop_locals: dict[tuple[str, str], GfMatrix] = {}
        src_set = set(net.sources)
        eye_k = GfMatrix.identity(fs, k)
        for eid, tail, _ in net.edges:
            if tail in src_set:
                continue
            for d in net.in_edges(tail):
                hop_locals[(d, eid)] = eye_k.scale(coef.get((eid, d), 0))

        params = CodeParameters(fs, s, k, rate_r, 0, c_min)
        globals_ = propagate_globals(net, params, source_locals, hop_locals)
        code = LinearSecureCode(net, params, source_locals, hop_locals, globals_, None, None)
        target = kron(coeffs, GfMatrix.identity(fs, rate_r))
        dec = solve_right(code.g_sink(), target)
        if dec is None:
            continue
        code.decoder = dec
        code.decode_target = target
        return code
    raise MulticastConstructionFailed(f"no rank-{rate_r} multicast code found in {retries} attempts")


def stacked_target(coeffs: GfMatrix, params: CodeParameters) -> GfMatrix:
    """T_{R-rk}: per source-column block [T_ij . I_ell ; 0_(rk x ell)]."""
    fs = coeffs.field
    ell = params.ell
    blocks = []
    for i in range(coeffs.rows):
        top = kron(GfMatrix(fs, [coeffs.data[i]]), GfMatrix.identity(fs, ell))
        blocks.append(top.vstack(GfMatrix.zeros(fs, params.keys, top.cols)))
    return vstack_all(blocks)


def build_security_matrix(upsilon: GfMatrix, params: CodeParameters) -> GfMatrix:
    """Stacked security matrix: per source [Upsilon_i kron I_ell ; 0_(rk x .)]."""
    if upsilon.rows != params.num_sources:
        raise ShapeError("security matrix must have one row per source")
    if rank(upsilon) != upsilon.cols:
        raise ShapeError("security coefficient matrix must have full column rank")
    fs = upsilon.field
    ell = params.ell
    blocks = []
    for i in range(upsilon.rows):
        top = kron(GfMatrix(fs, [upsilon.data[i]]), GfMatrix.identity(fs, ell))
        blocks.append(top.vstack(GfMatrix.zeros(fs, params.keys, top.cols)))
    return vstack_all(blocks)


@dataclass(frozen=True)
class TransformMatrix:
    """Per-source invertible R x R blocks; block-diagonal when assembled."""

    blocks: tuple[GfMatrix, ...]

    def bhat(self) -> GfMatrix:
        return block_diag(list(self.blocks))

    def bhat_inv(self) -> GfMatrix:
        invs = []
        for b in self.blocks:
            bi = inverse(b)
            if bi is None:
                raise ShapeError("transform block is singular")
            invs.append(bi)
        return block_diag(invs)


class _SpanBasis:
    """Incremental row-echelon basis for membership tests in F_q^R."""

    def __init__(self, fs: FieldSpec, dim: int):
        self.fs = fs
        self.dim = dim
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []

    def _reduce(self, vec: list[int]) -> list[int]:
        fs = self.fs
        v = list(vec)
        for row, piv in zip(self.rows, self.pivots):
            if v[piv]:
                c = v[piv]
                v = [fs.sub(a, fs.mul(c, b)) for a, b in zip(v, row)]
        return v

    def contains(self, vec: list[int]) -> bool:
        return not any(self._reduce(vec))

    def add(self, vec: list[int]) -> bool:
        v = self._reduce(vec)
        for piv, a in enumerate(v):
            if a:
                inv = self.fs.inv(a)
                self.rows.append([self.fs.mul(inv, x) for x in v])
                self.pivots.append(piv)
                return True
        return False


def _int_to_vec(value: int, q: int, dim: int) -> list[int]:
    digits = []
    for _ in range(dim):
        digits.append(value % q)
        value //= q
    digits.reverse()
    return digits


def select_b_vectors(
    base: LinearSecureCode,
    params: CodeParameters,
    wiretaps,
    mode: str = "lex",
    seed: int = 0,
) -> TransformMatrix:
    """Sequential subspace-avoidance choice of the transform columns.

    b_1..b_ell avoid every per-source wiretapped span extended by the
    already-chosen columns; b_(ell+1)..b_R only avoid the chosen span.
    Scanning is lexicographic by default (deterministic) or seeded random.
    Raises FieldTooSmall when an avoidance set covers the whole space,
    which cannot happen once q > s * |wiretaps|.
    """
    fs = params.field
    q = fs.q
    big_r = params.rate_r
    families = []
    for wset in wiretaps:
        gw = base.g_of(wset)
        for i in range(params.num_sources):
            basis = _SpanBasis(fs, big_r)
            block = base.source_block(gw, i)
            for col in range(block.cols):
                basis.add([block.data[rr][col] for rr in range(big_r)])
            families.append(basis)
    chosen = _SpanBasis(fs, big_r)
    columns: list[list[int]] = []
    rng = random.Random(seed)
    space = q ** big_r

    def candidates():
        if mode == "lex":
            for t in range(1, space):
                yield _int_to_vec(t, q, big_r)
        else:
            for _ in range(4 * space):
                yield _int_to_vec(rng.randrange(1, space), q, big_r)

    for j in range(big_r):
        secure_step = j < params.ell
        found = None
        for vec in candidates():
            if chosen.contains(vec):
                continue
            if secure_step and any(b.contains(vec) for b in families):
                continue
            found = vec
            break
        if found is None:
            raise FieldTooSmall(
                f"avoidance sets cover F_{q}^{big_r} while choosing column {j + 1}"
            )
        columns.append(found)
        chosen.add(found)
        if secure_step:
            for b in families:
                b.add(found)
    b_inv = GfMatrix(fs, [[col[rr] for col in columns] for rr in range(big_r)])
    b = inverse(b_inv)
    assert b is not None  # columns are independent by construction
    return TransformMatrix((b,) * params.num_sources)


def verify_transform(
    transform: TransformMatrix,
    base: LinearSecureCode,
    params: CodeParameters,
    coeffs: GfMatrix,
    security: GfMatrix,
    wiretaps,
) -> bool:
    """Check both admissibility conditions of the transformed code:
    decodability of the stacked target through the sink and trivial
    intersection of the keyed security span with every wiretapped span."""
    binv = transform.bhat_inv()
    if not column_span_contains(base.g_sink(), binv @ stacked_target(coeffs, params)):
        return False
    shifted = binv @ security
    for wset in wiretaps:
        if not wset:
            continue
        if not subspaces_intersect_trivially(shifted, base.g_of(wset)):
            return False
    return True


def search_transform(
    base: LinearSecureCode,
    params: CodeParameters,
    coeffs: GfMatrix,
    security: GfMatrix,
    wiretaps,
    seed: int = 0,
    budget: int = 2000,
    shared_block: bool = True,
) -> TransformMatrix:
    """Seeded randomized search over invertible transforms; first verified
    candidate wins.  Covers instances below the field-size guarantee."""
    fs = params.field
    q = fs.q
    big_r = params.rate_r
    rng = random.Random(seed)
    for _ in range(budget):
        blocks = []
        count = 1 if shared_block else params.num_sources
        ok = True
        for _ in range(count):
            m = GfMatrix(fs, [[rng.randrange(q) for _ in range(big_r)] for _ in range(big_r)])
            if inverse(m) is None:
                ok = False
                break
            blocks.append(m)
        if not ok:
            continue
        if shared_block:
            blocks = blocks * params.num_sources
        cand = TransformMatrix(tuple(blocks))
        if verify_transform(cand, base, params, coeffs, security, wiretaps):
            return cand
    raise SearchExhausted(f"no valid transform found in {budget} trials")


def apply_transform(
    base: LinearSecureCode,
    transform: TransformMatrix,
    params: CodeParameters,
    coeffs: GfMatrix,
) -> LinearSecureCode:
    """Produce the secure code: globals premultiplied by the block diagonal,
    source locals by their block, decoder re-solved for the stacked target.

    Per source the first ell coordinates carry messages and the trailing rk
    coordinates carry uniform keys.
    """
    bhat = transform.bhat()
    new_globals = {e: bhat @ g for e, g in base.globals_.items()}
    new_source_locals = dict(base.source_locals)
    for eid in base.source_locals:
        i = base.source_of_edge(eid)
        new_source_locals[eid] = transform.blocks[i] @ base.source_locals[eid]
    code = LinearSecureCode(
        base.net,
        params,
        new_source_locals,
        dict(base.hop_locals),
        new_globals,
        None,
        None,
    )
    target = stacked_target(coeffs, params)
    dec = solve_right(code.g_sink(), target)
    if dec is None:
        raise SecnetfcError("transform does not satisfy the decodability condition")
    code.decoder = dec
    code.decode_target = target
    return code


def field_size_bound(num_sources: int, wiretaps) -> int:
    """s * |W'_r|: any field strictly larger guarantees the sequential scheme."""
    return num_sources * sum(1 for _ in wiretaps)


def capacity_lower_bound(c_min: int, k: int, level: int) -> Fraction:
    """Achievable rate C_min/k - r of the construction at R = C_min."""
    if level * k > c_min:
        raise SecurityLevelTooHigh(f"need r*k <= C_min, got {level}*{k} > {c_min}")
    return Fraction(c_min, k) - level


# ---------------------------------------------------------------------------
# serialization (JSON-friendly dicts; the network travels separately)


def _mat_to_obj(m: GfMatrix) -> list[list[int]]:
    return [list(row) for row in m.data]


def code_to_dict(code: LinearSecureCode) -> dict:
    p = code.params
    return {
        "params": {
            "field": str(p.field),
            "sources": p.num_sources,
            "k": p.k,
            "R": p.rate_r,
            "level": p.level,
            "ell": p.ell,
            "keys": p.keys,
            "n": p.block,
            "c_min": p.c_min,
        },
        "source_locals": {e: _mat_to_obj(m) for e, m in sorted(code.source_locals.items())},
        "hop_locals": {f"{d}->{e}": _mat_to_obj(m) for (d, e), m in sorted(code.hop_locals.items())},
        "globals": {e: _mat_to_obj(m) for e, m in sorted(code.globals_.items())},
        "decoder": _mat_to_obj(code.decoder) if code.decoder is not None else None,
        "decode_target": _mat_to_obj(code.decode_target) if code.decode_target is not None else None,
    }


def code_from_dict(doc: dict, net: Network) -> LinearSecureCode:
    from .gf_linalg import field as make_field

    p = doc["params"]
    spec = p["field"]
    if "^" in str(spec):
        base_p, deg = str(spec).split("^")
        q = int(base_p) ** int(deg)
    else:
        q = int(spec)
    fs = make_field(q)
    params = CodeParameters(fs, p["sources"], p["k"], p["R"], p["level"], p["c_min"])
    mk = lambda obj: GfMatrix(fs, obj)
    source_locals = {e: mk(m) for e, m in doc["source_locals"].items()}
    hop_locals = {}
    for key, m in doc["hop_locals"].items():
        d, e = key.split("->")
        hop_locals[(d, e)] = mk(m)
    globals_ = {e: mk(m) for e, m in doc["globals"].items()}
    decoder = mk(doc["decoder"]) if doc.get("decoder") is not None else None
    target = mk(doc["decode_target"]) if doc.get("decode_target") is not None else None
    return LinearSecureCode(net, params, source_locals, hop_locals, globals_, decoder, target)
