"""Finite target/security functions as dense tables, and the general bounds.

Functions map the product of per-source alphabets to an output alphabet.
Everything information-theoretic reduces to partitions of the source-tuple
domain under the uniform product measure: a function induces the partition
of its fibers, strong decomposability asks all fixed-remainder slices to
induce one common partition, and the maximal common function of two
functions is the finest partition coarser than both (connected components
of the block-overlap graph).  Entropies are Shannon entropies in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Sequence

from .errors import DomainMismatch, InstanceTooLarge, MissingZeroElement, NotACutSet, ParseError
from .gf_linalg import GfMatrix
from .graph_core import Network, source_profile

DEFAULT_EDGE_LIMIT = 18


@dataclass(frozen=True)
class Alphabet:
    """A finite alphabet of `size` symbols indexed 0..size-1.

    `zero_index` designates the symbol used when an argument is pinned to
    "zero" (the neutral element for the bound of Theorem-2 style pinning).
    """

    size: int
    zero_index: int | None = 0

    def __post_init__(self):
        if self.size < 1:
            raise ParseError("alphabet size must be >= 1")


@dataclass(frozen=True)
class TabularFunction:
    """Dense finite function on a product of alphabets.

    The table is indexed in `itertools.product` order of the input tuples
    (last argument varies fastest).
    """

    input_alphabets: tuple[Alphabet, ...]
    output_alphabet: Alphabet
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.domain_size():
            raise ParseError("function table does not cover the product domain")
        if any(not 0 <= v < self.output_alphabet.size for v in self.table):
            raise ParseError("function value outside the output alphabet")

    def domain_size(self) -> int:
        n = 1
        for a in self.input_alphabets:
            n *= a.size
        return n

    def arity(self) -> int:
        return len(self.input_alphabets)

    def index_of(self, args: Sequence[int]) -> int:
        idx = 0
        for a, v in zip(self.input_alphabets, args):
            idx = idx * a.size + v
        return idx

    def __call__(self, *args: int) -> int:
        return self.table[self.index_of(args)]

    def is_constant(self) -> bool:
        return len(set(self.table)) <= 1

    @classmethod
    def from_callable(
        cls,
        sizes: Sequence[int],
        out_size: int,
        fn: Callable[..., int],
        zero_indexes: Sequence[int | None] | None = None,
    ) -> "TabularFunction":
        zi = zero_indexes if zero_indexes is not None else [0] * len(sizes)
        alphabets = tuple(Alphabet(s, z) for s, z in zip(sizes, zi))
        table = tuple(fn(*args) for args in product(*(range(s) for s in sizes)))
        return cls(alphabets, Alphabet(out_size), table)


def identity_function(sizes: Sequence[int]) -> TabularFunction:
    """The identity security function: outputs the whole source tuple."""
    out = 1
    for s in sizes:
        out *= s
    strides = []
    acc = 1
    for s in reversed(sizes):
        strides.append(acc)
        acc *= s
    strides.reverse()

    def fn(*args):
        return sum(a * st for a, st in zip(args, strides))

    return TabularFunction.from_callable(sizes, out, fn)


def linear_function_table(coeffs: GfMatrix) -> TabularFunction:
    """Tabular form of the vector-linear map m -> m . T over the field of T."""
    fs = coeffs.field
    q = fs.q
    s, k = coeffs.rows, coeffs.cols
    out_size = q ** k

    def fn(*args):
        acc = [0] * k
        for i, v in enumerate(args):
            if v:
                row = coeffs.data[i]
                for j in range(k):
                    acc[j] = fs.add(acc[j], fs.mul(v, row[j]))
        idx = 0
        for y in acc:
            idx = idx * q + y
        return idx

    return TabularFunction.from_callable([q] * s, out_size, fn)


@dataclass(frozen=True)
class Partition:
    """Partition of range(size); block ids are canonical (first-seen order)."""

    size: int
    blocks: tuple[int, ...]
    block_count: int

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        remap: dict = {}
        blocks = []
        for lab in labels:
            if lab not in remap:
                remap[lab] = len(remap)
            blocks.append(remap[lab])
        return cls(len(blocks), tuple(blocks), len(remap))

    @classmethod
    def identity(cls, size: int) -> "Partition":
        return cls(size, tuple(range(size)), size)

    def block_sizes(self) -> list[int]:
        counts = [0] * self.block_count
        for b in self.blocks:
            counts[b] += 1
        return counts

    def refines(self, other: "Partition") -> bool:
        """True if every block of self lies inside a block of other."""
        if self.size != other.size:
            raise DomainMismatch("partition domains differ")
        seen: dict[int, int] = {}
        for mine, theirs in zip(self.blocks, other.blocks):
            if mine in seen:
                if seen[mine] != theirs:
                    return False
            else:
                seen[mine] = theirs
        return True


def induced_partition(g: TabularFunction) -> Partition:
    """Partition of the full product domain into the fibers of g."""
    return Partition.from_labels(g.table)


def maximal_common_function(p1: Partition, p2: Partition) -> Partition:
    """Finest partition coarser than both arguments.

    Realized as connected components of the bipartite block-overlap graph
    (union-find over elements sharing a block in either partition); this is
    the maximum-entropy function computable from each argument alone.
    """
    if p1.size != p2.size:
        raise DomainMismatch("partition domains differ")
    parent = list(range(p1.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    first_of_block: dict[tuple[int, int], int] = {}
    for p, labels in ((0, p1.blocks), (1, p2.blocks)):
        for i, b in enumerate(labels):
            key = (p, b)
            if key in first_of_block:
                union(first_of_block[key], i)
            else:
                first_of_block[key] = i
    return Partition.from_labels([find(i) for i in range(p1.size)])


def entropy_uniform(p: Partition) -> float:
    """Shannon entropy in bits of the block distribution under the uniform
    measure on the domain."""
    n = p.size
    h = 0.0
    for c in p.block_sizes():
        if c:
            h -= (c / n) * math.log2(c / n)
    return h


# ---------------------------------------------------------------------------
# decomposition machinery


def _source_positions(net: Network, subset: Iterable[str]) -> list[int]:
    pos = {s: i for i, s in enumerate(net.sources)}
    return sorted(pos[s] for s in subset)


def _slice_partition(f: TabularFunction, inner: list[int], fixed: dict[int, int]) -> tuple:
    """Canonical partition label tuple of the inner-argument domain with the
    remaining arguments pinned to `fixed`."""
    sizes = [f.input_alphabets[i].size for i in inner]
    args = [0] * f.arity()
    for i, v in fixed.items():
        args[i] = v
    labels = []
    for combo in product(*(range(s) for s in sizes)):
        for i, v in zip(inner, combo):
            args[i] = v
        labels.append(f(*args))
    return Partition.from_labels(labels).blocks


def strong_decomposition(net: Network, cut: Iterable[str], f: TabularFunction) -> Partition | None:
    """Intermediate-function partition f_C on the inner domain, or None.

    The pair (C, f) is strongly decomposable exactly when every slice of f
    with the outer arguments fixed induces the same partition of the inner
    domain; that common partition is the canonical intermediate function.
    """
    prof = source_profile(net, cut)
    if not prof.i_set:
        raise NotACutSet("edge set does not disconnect any source")
    return _strong_decomposition_on(net, prof.i_set, f)


def _strong_decomposition_on(net: Network, i_set: frozenset[str], f: TabularFunction) -> Partition | None:
    inner = _source_positions(net, i_set)
    outer = [i for i in range(f.arity()) if i not in inner]
    reference: tuple | None = None
    outer_sizes = [f.input_alphabets[i].size for i in outer]
    for combo in product(*(range(s) for s in outer_sizes)):
        fixed = dict(zip(outer, combo))
        blocks = _slice_partition(f, inner, fixed)
        if reference is None:
            reference = blocks
        elif blocks != reference:
            return None
    assert reference is not None
    return Partition(len(reference), reference, max(reference) + 1 if reference else 0)


def lift_partition(p: Partition, net: Network, i_set: frozenset[str], f: TabularFunction) -> Partition:
    """Expand a partition of the inner-argument domain to the full domain."""
    inner = _source_positions(net, i_set)
    sizes = [a.size for a in f.input_alphabets]
    inner_sizes = [sizes[i] for i in inner]
    labels = []
    for args in product(*(range(s) for s in sizes)):
        idx = 0
        for i, sz in zip(inner, inner_sizes):
            idx = idx * sz + args[i]
        labels.append(p.blocks[idx])
    return Partition.from_labels(labels)


# ---------------------------------------------------------------------------
# bounds


def _iter_cut_sets(net: Network, edge_limit: int):
    from itertools import combinations

    ids = net.edge_ids
    if len(ids) > edge_limit:
        raise InstanceTooLarge(f"{len(ids)} edges exceed the configured limit {edge_limit}")
    for size in range(1, len(ids) + 1):
        for combo in combinations(ids, size):
            prof = source_profile(net, combo)
            if prof.i_set:
                yield frozenset(combo), prof


def _best_wiretap(net: Network, cut: frozenset[str], i_set: frozenset[str], level: int,
                  d_of_edge: dict[str, frozenset[str]]) -> frozenset[str]:
    admissible = [e for e in net.sorted_edges(cut) if d_of_edge[e] <= i_set]
    return frozenset(admissible[: min(level, len(admissible))])


def _edge_sources(net: Network) -> dict[str, frozenset[str]]:
    d: dict[str, set[str]] = {e: set() for e in net.edge_ids}
    for s in net.sources:
        reach = net.reachable_from([s])
        for eid, t, _ in net.edges:
            if t in reach:
                d[eid].add(s)
    return {e: frozenset(v) for e, v in d.items()}


def general_upper_bound(
    net: Network,
    f: TabularFunction,
    zeta: TabularFunction,
    level: int,
    b_size: int,
    edge_limit: int = DEFAULT_EDGE_LIMIT,
) -> tuple[float, tuple[frozenset[str], frozenset[str]] | None]:
    """Capacity upper bound for arbitrary target/security functions.

    Minimizes (|C| - |W|) * log2(b_size) / H(f_C meet zeta) over all valid
    pairs: (C, f) strongly decomposable, W <= C, D_W <= I_C.  Pairs whose
    common-function entropy vanishes impose no constraint and are skipped;
    returns (inf, None) when nothing constrains the rate.
    """
    zeta_part = induced_partition(zeta)
    d_of_edge = _edge_sources(net)
    decomp_cache: dict[frozenset[str], float | None] = {}
    best_val = math.inf
    best_witness: tuple[frozenset[str], frozenset[str]] | None = None
    best_key = None
    for cut, prof in _iter_cut_sets(net, edge_limit):
        h = decomp_cache.get(prof.i_set, "miss")
        if h == "miss":
            inner = _strong_decomposition_on(net, prof.i_set, f)
            if inner is None:
                h = None
            else:
                lifted = lift_partition(inner, net, prof.i_set, f)
                meet = maximal_common_function(lifted, zeta_part)
                h = entropy_uniform(meet) if meet.block_count > 1 else 0.0
            decomp_cache[prof.i_set] = h
        if h is None or h == 0.0:
            continue
        wset = _best_wiretap(net, cut, prof.i_set, level, d_of_edge)
        value = (len(cut) - len(wset)) * math.log2(b_size) / h
        key = (value, sorted(net.edge_index[e] for e in cut), sorted(net.edge_index[e] for e in wset))
        if best_key is None or key < best_key:
            best_key = key
            best_val = value
            best_witness = (cut, wset)
    return best_val, best_witness


def theorem2_upper_bound(
    net: Network,
    f: TabularFunction,
    b_size: int,
    edge_limit: int = DEFAULT_EDGE_LIMIT,
) -> tuple[float, frozenset[str] | None]:
    """Pinned-slice capacity upper bound: min |C| * log2(b) / H(f(M_I, 0)).

    Every outer argument is pinned to its alphabet's designated zero.
    Cuts with a constant pinned slice are skipped.
    """
    for a in f.input_alphabets:
        if a.zero_index is None:
            raise MissingZeroElement("every input alphabet needs a designated zero")
    h_cache: dict[frozenset[str], float] = {}
    best_val = math.inf
    best_witness = None
    best_key = None
    for cut, prof in _iter_cut_sets(net, edge_limit):
        h = h_cache.get(prof.i_set)
        if h is None:
            inner = _source_positions(net, prof.i_set)
            fixed = {
                i: f.input_alphabets[i].zero_index
                for i in range(f.arity())
                if i not in inner
            }
            blocks = _slice_partition(f, inner, fixed)
            part = Partition(len(blocks), blocks, max(blocks) + 1)
            h = entropy_uniform(part)
            h_cache[prof.i_set] = h
        if h == 0.0:
            continue
        value = len(cut) * math.log2(b_size) / h
        key = (value, sorted(net.edge_index[e] for e in cut))
        if best_key is None or key < best_key:
            best_key = key
            best_val = value
            best_witness = cut
    return best_val, best_witness


def combined_upper_bound(
    net: Network,
    f: TabularFunction,
    zeta: TabularFunction,
    level: int,
    b_size: int,
    edge_limit: int = DEFAULT_EDGE_LIMIT,
) -> tuple[float, dict]:
    """Minimum of the general and the pinned-slice bounds, with provenance."""
    g_val, g_wit = general_upper_bound(net, f, zeta, level, b_size, edge_limit)
    t_val, t_wit = theorem2_upper_bound(net, f, b_size, edge_limit)
    if g_val <= t_val:
        return g_val, {"rule": "general", "witness": g_wit}
    return t_val, {"rule": "pinned", "witness": t_wit}


# ---------------------------------------------------------------------------
# text format:
#   alphabets a1 a2 ... as / out o
#   i1 i2 ... is -> o_index     (one line per input tuple)


def parse_function_table(text: str) -> TabularFunction:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty function table document")
    head = lines[0].split()
    if head[0] != "alphabets" or "/" not in head or head[-2] != "out":
        raise ParseError(f"bad function table header: {lines[0]!r}")
    slash = head.index("/")
    sizes = [int(tok) for tok in head[1:slash]]
    out_size = int(head[-1])
    entries: dict[tuple[int, ...], int] = {}
    for ln in lines[1:]:
        if "->" not in ln:
            raise ParseError(f"bad function table row: {ln!r}")
        left, right = ln.split("->", 1)
        args = tuple(int(tok) for tok in left.split())
        val = int(right.strip())
        if len(args) != len(sizes):
            raise ParseError(f"row arity mismatch: {ln!r}")
        entries[args] = val
    table = []
    for combo in product(*(range(s) for s in sizes)):
        if combo not in entries:
            raise ParseError(f"function table is missing input {combo}")
        table.append(entries[combo])
    alphabets = tuple(Alphabet(s) for s in sizes)
    return TabularFunction(alphabets, Alphabet(out_size), tuple(table))


def format_function_table(f: TabularFunction) -> str:
    sizes = [a.size for a in f.input_alphabets]
    head = "alphabets " + " ".join(str(s) for s in sizes) + f" / out {f.output_alphabet.size}"
    rows = []
    for combo in product(*(range(s) for s in sizes)):
        rows.append(" ".join(str(v) for v in combo) + f" -> {f(*combo)}")
    return "\n".join([head] + rows) + "\n"
