"""Independent admissibility checking for secure network codes.

Three layers of evidence, strongest first: exhaustive mutual-information
accounting over all (message, key) realizations with exact rational joint
probabilities, the algebraic subspace condition that is equivalent to it
for linear codes, and a computability check that replays the local
encoding recursion and decodes every (or, beyond the budget, a seeded
sample of) realizations.

Linear codes carry matrices; the nonlinear fixture codes carry per-edge
lookup tables.  `simulate` and the MI oracle only need "evaluate the edge
symbol for one realization", so both representations share them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from .code_builder import LinearSecureCode, build_security_matrix
from .errors import InstanceTooLarge, ShapeError
from .function_table import TabularFunction
from .gf_linalg import GfMatrix, subspaces_intersect_trivially
from .graph_core import Network

DEFAULT_MI_BUDGET = 1 << 20
DEFAULT_SAMPLES = 10_000


@dataclass
class TabularCode:
    """A (1, 1) nonlinear code given by per-edge lookup tables.

    Source-adjacent edges map one (message, key) pair to a symbol; other
    edges map the tuple of their tail's incoming symbols (in declaration
    order) to a symbol.  The decoder maps the sink's incoming symbols to an
    output value.
    """

    net: Network
    message_sizes: tuple[int, ...]
    key_sizes: tuple[int, ...]
    edge_alphabet: int
    source_tables: dict[str, Callable[[int, int], int]]
    hop_tables: dict[str, Callable[..., int]]
    decoder: Callable[..., int]

    ell = 1
    block = 1


def realization_count(code) -> int:
    """Number of (message, key) realizations to enumerate exhaustively."""
    if isinstance(code, LinearSecureCode):
        p = code.params
        return p.field.q ** (p.rate_r * p.num_sources)
    n = 1
    for m, k in zip(code.message_sizes, code.key_sizes):
        n *= m * k
    return n


def simulate(code, x) -> dict[str, tuple[int, ...]]:
    """Traffic on every edge for one realization, by local propagation.

    For linear codes `x` is the flat (message, key) row over all sources
    (length R*s); for tabular codes it is ((m_1..m_s), (k_1..k_s)).
    """
    if isinstance(code, LinearSecureCode):
        return _simulate_linear(code, x)
    return _simulate_tabular(code, x)


def _simulate_linear(code: LinearSecureCode, x: Sequence[int]) -> dict[str, tuple[int, ...]]:
    p = code.params
    fs = p.field
    big_r, n = p.rate_r, p.block
    if len(x) != big_r * p.num_sources:
        raise ShapeError(f"realization must have {big_r * p.num_sources} symbols")
    src_index = {s: i for i, s in enumerate(code.net.sources)}
    add, mul = fs.add, fs.mul
    traffic: dict[str, tuple[int, ...]] = {}
    for eid in code.net.topo_edges():
        tail = code.net.tail(eid)
        if tail in src_index:
            i = src_index[tail]
            xi = x[i * big_r : (i + 1) * big_r]
            mat = code.source_locals[eid]
            out = [0] * n
            for rr, v in enumerate(xi):
                if v:
                    row = mat.data[rr]
                    for c in range(n):
                        out[c] = add(out[c], mul(v, row[c]))
        else:
            out = [0] * n
            for d in code.net.in_edges(tail):
                yd = traffic[d]
                mat = code.hop_locals[(d, eid)]
                for rr, v in enumerate(yd):
                    if v:
                        row = mat.data[rr]
                        for c in range(n):
                            out[c] = add(out[c], mul(v, row[c]))
        traffic[eid] = tuple(out)
    return traffic


def _simulate_tabular(code: TabularCode, x) -> dict[str, tuple[int, ...]]:
    messages, keys = x
    src_index = {s: i for i, s in enumerate(code.net.sources)}
    traffic: dict[str, tuple[int, ...]] = {}
    for eid in code.net.topo_edges():
        tail = code.net.tail(eid)
        if tail in src_index:
            i = src_index[tail]
            sym = code.source_tables[eid](messages[i], keys[i])
        else:
            ins = tuple(traffic[d][0] for d in code.net.in_edges(tail))
            sym = code.hop_tables[eid](*ins)
        traffic[eid] = (sym,)
    return traffic


def check_consistency(code) -> bool:
    """Stored globals must equal the locals' recursion, edge by edge."""
    if not isinstance(code, LinearSecureCode):
        return True
    recomputed = code.recompute_globals()
    return all(recomputed[e] == code.globals_[e] for e in code.net.edge_ids)


def _decode_linear(code: LinearSecureCode, traffic) -> list[int]:
    p = code.params
    fs = p.field
    y = []
    for e in code.net.in_edges(code.net.sink):
        y.extend(traffic[e])
    dec = code.decoder
    out = [0] * dec.cols
    add, mul = fs.add, fs.mul
    for rr, v in enumerate(y):
        if v:
            row = dec.data[rr]
            for c in range(dec.cols):
                out[c] = add(out[c], mul(v, row[c]))
    return out


def _expected_linear(code: LinearSecureCode, x) -> list[int]:
    fs = code.params.field
    tgt = code.decode_target
    out = [0] * tgt.cols
    add, mul = fs.add, fs.mul
    for rr, v in enumerate(x):
        if v:
            row = tgt.data[rr]
            for c in range(tgt.cols):
                out[c] = add(out[c], mul(v, row[c]))
    return out


def check_computability(
    code,
    target: TabularFunction | None = None,
    budget: int = DEFAULT_MI_BUDGET,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> bool:
    """Zero-error decoding check.

    Linear codes: the stored decoder must reproduce the decode target
    algebraically, and the local-recursion traffic must decode correctly
    for every realization (exhaustively within the budget, else for a
    seeded sample).  Tabular codes decode the supplied target function
    exhaustively.
    """
    if isinstance(code, LinearSecureCode):
        p = code.params
        if code.decoder is None or code.decode_target is None:
            return False
        if (code.g_sink() @ code.decoder) != code.decode_target:
            return False
        total = realization_count(code)
        dims = p.rate_r * p.num_sources
        q = p.field.q
        if total <= budget:
            space = product(range(q), repeat=dims)
        else:
            import random

            rng = random.Random(seed)
            space = ([rng.randrange(q) for _ in range(dims)] for _ in range(samples))
        for x in space:
            traffic = _simulate_linear(code, x)
            if _decode_linear(code, traffic) != _expected_linear(code, x):
                return False
        return True

    if target is None:
        raise ShapeError("tabular computability check needs the target function")
    for messages in product(*(range(m) for m in code.message_sizes)):
        for keys in product(*(range(k) for k in code.key_sizes)):
            traffic = _simulate_tabular(code, (messages, keys))
            ins = tuple(traffic[e][0] for e in code.net.in_edges(code.net.sink))
            if code.decoder(*ins) != target(*messages):
                return False
    return True


def check_security_algebraic(code: LinearSecureCode, upsilon: GfMatrix, family) -> bool:
    """Subspace form of the security condition: the wiretapped span meets
    the keyed security span only in zero, for every set in the family."""
    sec = build_security_matrix(upsilon, code.params)
    for wset in family:
        if not wset:
            continue
        if not subspaces_intersect_trivially(code.g_of(wset), sec):
            return False
    return True


# ---------------------------------------------------------------------------
# exact mutual information


def _zeta_evaluator(code, zeta):
    """Per-realization security-function value as a hashable key."""
    if isinstance(code, LinearSecureCode):
        p = code.params
        fs = p.field
        big_r, ell = p.rate_r, p.ell
        if isinstance(zeta, GfMatrix):
            cols = list(zip(*zeta.data))

            def value(x):
                out = []
                for j in range(ell):
                    m_row = [x[i * big_r + j] for i in range(p.num_sources)]
                    for col in cols:
                        acc = 0
                        for v, c in zip(m_row, col):
                            if v and c:
                                acc = fs.add(acc, fs.mul(v, c))
                        out.append(acc)
                return tuple(out)

            return value
        if isinstance(zeta, TabularFunction):

            def value(x):
                return tuple(
                    zeta(*(x[i * big_r + j] for i in range(p.num_sources)))
                    for j in range(ell)
                )

            return value
        raise ShapeError("security function must be a matrix or a tabular function")

    if not isinstance(zeta, TabularFunction):
        raise ShapeError("tabular codes need a tabular security function")

    def value(x):
        messages, _ = x
        return (zeta(*messages),)

    return value


def _realizations(code):
    if isinstance(code, LinearSecureCode):
        p = code.params
        return product(range(p.field.q), repeat=p.rate_r * p.num_sources)
    spaces = []
    for m in code.message_sizes:
        spaces.append(range(m))
    for k in code.key_sizes:
        spaces.append(range(k))
    s = len(code.message_sizes)

    def gen():
        for combo in product(*spaces):
            yield (combo[:s], combo[s:])

    return gen()


def _edge_symbol_evaluator(code):
    """Fast per-realization edge symbols; linear codes use the globals."""
    if isinstance(code, LinearSecureCode):
        fs = code.params.field
        sparse = {
            e: [
                [(rr, row[c]) for rr, row in enumerate(g.data) if row[c]]
                for c in range(g.cols)
            ]
            for e, g in code.globals_.items()
        }
        if fs.m == 1:
            p = fs.p

            def symbols(x, edges):
                out = {}
                for e in edges:
                    out[e] = tuple(
                        sum(x[rr] * cf for rr, cf in col) % p for col in sparse[e]
                    )
                return out

        else:

            def symbols(x, edges):
                out = {}
                for e in edges:
                    vals = []
                    for col in sparse[e]:
                        acc = 0
                        for rr, cf in col:
                            if x[rr]:
                                acc = fs.add(acc, fs.mul(x[rr], cf))
                        vals.append(acc)
                    out[e] = tuple(vals)
                return out

        return symbols

    def symbols(x, edges):
        traffic = _simulate_tabular(code, x)
        return {e: traffic[e] for e in edges}

    return symbols


def _joint_counts(code, families: list[frozenset[str]], zeta):
    """One pass over all realizations, accumulating per-family joints."""
    edges_needed = sorted(set().union(*families)) if families else []
    ordered = [tuple(code.net.sorted_edges(w)) for w in families]
    zeta_of = _zeta_evaluator(code, zeta)
    symbols_of = _edge_symbol_evaluator(code)
    joints = [dict() for _ in families]
    y_marg = [dict() for _ in families]
    z_marg: dict = {}
    total = 0
    for x in _realizations(code):
        total += 1
        zkey = zeta_of(x)
        z_marg[zkey] = z_marg.get(zkey, 0) + 1
        syms = symbols_of(x, edges_needed)
        for idx, worder in enumerate(ordered):
            ykey = tuple(syms[e] for e in worder)
            j = joints[idx]
            j[(ykey, zkey)] = j.get((ykey, zkey), 0) + 1
            m = y_marg[idx]
            m[ykey] = m.get(ykey, 0) + 1
    return joints, y_marg, z_marg, total


def _mi_bits(joint, y_marg, z_marg, total) -> tuple[bool, float]:
    """(exactly-zero?, value in bits) from integer counts."""
    exact_zero = True
    value = 0.0
    for (ykey, zkey), n in joint.items():
        ny, nz = y_marg[ykey], z_marg[zkey]
        if n * total != ny * nz:
            exact_zero = False
        value += (n / total) * math.log2(n * total / (ny * nz))
    if exact_zero:
        return True, 0.0
    return False, value


def mutual_information_oracle(
    code, wiretap, zeta, budget: int = DEFAULT_MI_BUDGET
) -> float:
    """Exact I(Y_W ; zeta(M_S)) in bits by exhaustive enumeration.

    Zero is decided by the integer identity joint*N == y_marginal *
    z_marginal, so a return of 0.0 means exactly independent.
    """
    wset = frozenset(wiretap)
    if not wset:
        return 0.0
    total = realization_count(code)
    if total > budget:
        raise InstanceTooLarge(f"{total} realizations exceed the MI budget {budget}")
    joints, y_marg, z_marg, n = _joint_counts(code, [wset], zeta)
    _, value = _mi_bits(joints[0], y_marg[0], z_marg, n)
    return value


# ---------------------------------------------------------------------------
# aggregate report


@dataclass
class WiretapVerdict:
    edges: tuple[str, ...]
    algebraic_ok: bool | None
    mi_bits: float | None


@dataclass
class SecurityReport:
    admissible: bool
    rate: Fraction
    computability: bool
    consistent: bool
    mi_exhaustive: bool
    per_wiretap: list[WiretapVerdict]

    def to_json_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "rate": f"{self.rate.numerator}/{self.rate.denominator}",
            "computability": self.computability,
            "consistent": self.consistent,
            "mi_exhaustive": self.mi_exhaustive,
            "per_wiretap": [
                {
                    "edges": list(v.edges),
                    "algebraic_ok": v.algebraic_ok,
                    "mi_bits": v.mi_bits,
                }
                for v in self.per_wiretap
            ],
        }


def full_report(
    code,
    zeta,
    level: int,
    target: TabularFunction | None = None,
    mi_budget: int = DEFAULT_MI_BUDGET,
    seed: int = 0,
) -> SecurityReport:
    """Aggregate verdict over the exact-level primary wiretap family.

    The algebraic check always runs for linear codes; the MI oracle runs
    when the realization space fits the budget.  Admissibility requires
    consistency, computability and every security verdict available.
    """
    from .cut_lattice import enumerate_primary_wiretaps

    net: Network = code.net
    fam = enumerate_primary_wiretaps(net, min(level, len(net.edges)))
    # every wiretap set of size <= r carries a deterministic function of the
    # traffic on some family member, so checking all bottoms is sufficient
    family = [w for w in fam.members if w]

    consistent = check_consistency(code)
    computable = check_computability(code, target=target, budget=mi_budget, seed=seed)
    exhaustive = realization_count(code) <= mi_budget

    verdicts: list[WiretapVerdict] = []
    linear = isinstance(code, LinearSecureCode)
    mi_zero: list[bool | None] = [None] * len(family)
    mi_values: list[float | None] = [None] * len(family)
    if exhaustive and family:
        joints, y_marg, z_marg, n = _joint_counts(code, family, zeta)
        for idx, (j, m) in enumerate(zip(joints, y_marg)):
            mi_zero[idx], mi_values[idx] = _mi_bits(j, m, z_marg, n)

    for idx, wset in enumerate(family):
        alg = None
        if linear and isinstance(zeta, GfMatrix):
            alg = check_security_algebraic(code, zeta, [wset])
        verdicts.append(
            WiretapVerdict(tuple(net.sorted_edges(wset)), alg, mi_values[idx])
        )

    secure = True
    for idx, v in enumerate(verdicts):
        if v.algebraic_ok is None and mi_zero[idx] is None:
            secure = False  # no evidence at all for this set
        if v.algebraic_ok is False or mi_zero[idx] is False:
            secure = False

    if isinstance(code, LinearSecureCode):
        rate = Fraction(code.params.ell, code.params.block)
    else:
        rate = Fraction(code.ell, code.block)
    admissible = consistent and computable and secure
    return SecurityReport(admissible, rate, computable, consistent, exhaustive, verdicts)
