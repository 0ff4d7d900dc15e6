"""Command-line surface: bound / construct / verify / oracle / report.

Inputs are the text formats of the library (network declarations, matrix
documents, function tables); outputs are deterministic JSON documents:
keys sorted, exact rationals as "num/den" strings, floats rounded to 12
significant digits.  Identical jobs (including seeds) produce
byte-identical output.  Errors exit nonzero with a machine-readable code.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import code_builder as cb
from . import cut_lattice as cl
from . import function_table as ft
from . import gf_linalg as gl
from . import verifier as vf
from .errors import (
    FieldTooSmall,
    InstanceTooLarge,
    ParseError,
    SearchExhausted,
    SecnetfcError,
)
from .graph_core import Network, parse_network

_EXIT_CODES = {
    ParseError: 2,
    InstanceTooLarge: 3,
    FieldTooSmall: 4,
    SearchExhausted: 5,
}


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        if value == float("inf"):
            return "inf"
        return float(f"{value:.12g}")
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    sys.stdout.write(text)


def _load_network(path: str) -> Network:
    return parse_network(Path(path).read_text())


def _load_matrix(path: str) -> gl.GfMatrix:
    return gl.parse_matrix(Path(path).read_text())


def _load_table(path: str) -> ft.TabularFunction:
    return ft.parse_function_table(Path(path).read_text())


def _lift(matrix: gl.GfMatrix, fs: gl.FieldSpec) -> gl.GfMatrix:
    """Reinterpret a matrix in a larger field of the same characteristic."""
    if matrix.field == fs:
        return matrix
    if matrix.field.p != fs.p or matrix.field.m != 1:
        raise ParseError(
            f"cannot lift matrix over {matrix.field} into GF({fs.q}): "
            "characteristics differ"
        )
    return gl.GfMatrix(fs, matrix.data)


def _sorted_edges(net: Network, edges) -> list[str]:
    return net.sorted_edges(edges)


def _bound_doc(args) -> dict:
    net = _load_network(args.network)
    doc: dict = {}
    if args.target_matrix:
        coeffs = _load_matrix(args.target_matrix)
        coeffs, net2 = cb.preprocess_target(coeffs, net)
        bound = cl.algorithm2_bound(net2, coeffs, args.level)
        doc["linear_bound"] = bound.value
        doc["linear_witness"] = {
            "wiretap": _sorted_edges(net2, bound.witness_wiretap),
            "cut": _sorted_edges(net2, bound.witness_cut),
        }
    if args.target_table:
        f = _load_table(args.target_table)
        b_size = args.field or 2
        if args.security_table:
            zeta = _load_table(args.security_table)
        else:
            zeta = ft.identity_function([a.size for a in f.input_alphabets])
        g_val, g_wit = ft.general_upper_bound(net, f, zeta, args.level, b_size, args.limit_edges)
        t_val, t_wit = ft.theorem2_upper_bound(net, f, b_size, args.limit_edges)
        doc["general_bound"] = g_val
        doc["general_witness"] = (
            None
            if g_wit is None
            else {"cut": _sorted_edges(net, g_wit[0]), "wiretap": _sorted_edges(net, g_wit[1])}
        )
        doc["theorem2_bound"] = t_val
        doc["theorem2_witness"] = None if t_wit is None else _sorted_edges(net, t_wit)
        doc["combined_bound"] = min(g_val, t_val)
    if not doc:
        raise ParseError("bound needs --target-matrix or --target-table")
    return doc


def _construct_doc(args) -> tuple[dict, dict]:
    net = _load_network(args.network)
    if not args.target_matrix or not args.security_matrix:
        raise ParseError("construct needs --target-matrix and --security-matrix")
    coeffs = _load_matrix(args.target_matrix)
    upsilon = _load_matrix(args.security_matrix)
    fs = gl.field(args.field) if args.field else coeffs.field
    coeffs = _lift(coeffs, fs)
    upsilon = _lift(upsilon, fs)
    coeffs, net = cb.preprocess_target(coeffs, net)
    if upsilon.rows != len(net.sources):
        raise ParseError("security matrix rows must match the surviving sources")

    level = args.level
    c_min = cb.network_mincut(net)
    rate_r = args.rate if args.rate is not None else c_min
    family = cl.enumerate_primary_wiretaps(net, level)
    wiretaps = family.exact_members
    params = cb.CodeParameters(fs, len(net.sources), coeffs.cols, rate_r, level, c_min)
    lower = cb.capacity_lower_bound(c_min, coeffs.cols, level)

    base = cb.build_base_code(net, coeffs, rate_r, seed=args.seed, retries=args.retries)
    security = cb.build_security_matrix(upsilon, params)
    scheme = "sequential"
    try:
        transform = cb.select_b_vectors(base, params, wiretaps)
    except FieldTooSmall:
        scheme = "search"
        transform = cb.search_transform(
            base, params, coeffs, security, wiretaps, seed=args.seed, budget=args.budget
        )
    if not cb.verify_transform(transform, base, params, coeffs, security, wiretaps):
        raise SearchExhausted("selected transform failed verification")
    code = cb.apply_transform(base, transform, params, coeffs)
    doc = {
        "scheme": scheme,
        "field": str(fs),
        "rate": Fraction(params.ell, params.block),
        "c_min": c_min,
        "field_size_bound": cb.field_size_bound(len(net.sources), wiretaps),
        "capacity_lower_bound": lower,
        "exact_wiretap_count": len(wiretaps),
        "code": cb.code_to_dict(code),
    }
    return doc, {"code": code, "net": net, "upsilon": upsilon, "params": params}


def _verify_doc(args, code=None, net=None, upsilon=None) -> dict:
    if net is None:
        net = _load_network(args.network)
    if upsilon is None:
        if not args.security_matrix:
            raise ParseError("verify needs --security-matrix")
        upsilon = _load_matrix(args.security_matrix)
    if code is None:
        if not args.code:
            raise ParseError("verify needs --code")
        code = cb.code_from_dict(json.loads(Path(args.code).read_text()), net)
    upsilon = _lift(upsilon, code.params.field)
    report = vf.full_report(code, upsilon, args.level, mi_budget=args.mi_budget, seed=args.seed)
    return report.to_json_dict()


def _oracle_doc(args) -> dict:
    net = _load_network(args.network)
    if not args.target_matrix:
        raise ParseError("oracle needs --target-matrix")
    coeffs = _load_matrix(args.target_matrix)
    coeffs, net = cb.preprocess_target(coeffs, net)
    bound = cl.bruteforce_linear_bound(net, coeffs, args.level, edge_limit=args.limit_edges)
    return {
        "bruteforce_linear_bound": bound.value,
        "witness": {
            "wiretap": _sorted_edges(net, bound.witness_wiretap),
            "cut": _sorted_edges(net, bound.witness_cut),
        },
    }


def run(args) -> dict:
    if args.command == "bound":
        return _bound_doc(args)
    if args.command == "construct":
        doc, _ = _construct_doc(args)
        return doc
    if args.command == "verify":
        return _verify_doc(args)
    if args.command == "oracle":
        return _oracle_doc(args)
    if args.command == "report":
        construct, handles = _construct_doc(args)
        bound = _bound_doc(args)
        verify = _verify_doc(
            args, code=handles["code"], net=handles["net"], upsilon=handles["upsilon"]
        )
        return {"bound": bound, "construct": construct, "verify": verify}
    raise ParseError(f"unknown command {args.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secnetfc",
        description="Bounds, constructions and verification for secure network function computation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("bound", "construct", "verify", "oracle", "report"):
        p = sub.add_parser(name)
        p.add_argument("--network", required=True, help="network declaration file")
        p.add_argument("--target-matrix", help="target coefficient matrix file")
        p.add_argument("--security-matrix", help="security coefficient matrix file")
        p.add_argument("--target-table", help="target function table file")
        p.add_argument("--security-table", help="security function table file")
        p.add_argument("--code", help="serialized code JSON (verify)")
        p.add_argument("--field", type=int, help="field order q, or |B| for tabular bounds")
        p.add_argument("--level", type=int, default=0, help="security level r")
        p.add_argument("--rate", type=int, default=None, help="construction rate R (default C_min)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--limit-edges", type=int, default=cl.DEFAULT_EDGE_LIMIT)
        p.add_argument("--retries", type=int, default=cb.DEFAULT_RETRIES)
        p.add_argument("--budget", type=int, default=2000, help="transform search budget")
        p.add_argument("--mi-budget", type=int, default=vf.DEFAULT_MI_BUDGET)
        p.add_argument("--out", help="also write the JSON document to this path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = run(args)
    except SecnetfcError as exc:
        _emit({"error": {"code": exc.code, "message": str(exc)}}, getattr(args, "out", None))
        for klass, code in _EXIT_CODES.items():
            if isinstance(exc, klass):
                return code
        return 1
    _emit(doc, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
