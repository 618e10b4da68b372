"""Command-line front end.

One JSON object (or a two-line TSV header/row) goes to stdout; warnings
and progress notes go to stderr.  Exit codes: 0 success, 1 domain or
input error, 2 usage error.  Exact counts are serialized as decimal
strings so arbitrary precision survives JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import betas, cumulants, estimate, exact, graphs, regular
from .errors import FactorxError
from .numformat import mantissa_exponent

__all__ = ["run", "main"]


def _add_common_output(parser: argparse.ArgumentParser):
    parser.add_argument("--output", choices=("json", "tsv"), default="json")
    parser.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker budget for internally parallel stages "
        "(current stages are deterministic and single-threaded)",
    )


def _add_graph_args(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph", metavar="PATH", help="graph file")
    group.add_argument("--kn", type=int, metavar="N", help="complete graph on N vertices")
    parser.add_argument(
        "--format",
        choices=("edgelist", "graph6"),
        default="edgelist",
        help="graph file format",
    )


def _add_degree_args(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--degrees", metavar="PATH", help="file of target degrees")
    group.add_argument("--d", metavar="LIST", help="inline degrees, e.g. 3,3,4,4")
    group.add_argument("--regular", type=int, metavar="D", help="constant target degree D")


def _load_graph(args) -> graphs.Graph:
    if args.kn is not None:
        return graphs.complete_graph(args.kn)
    with open(args.graph, "r", encoding="utf-8") as fh:
        text = fh.read()
    if args.format == "graph6":
        return graphs.parse_graph6(text)
    return graphs.parse_edge_list(text)


def _load_degrees(args, graph: graphs.Graph) -> list[int]:
    if args.regular is not None:
        return [args.regular] * graph.n
    if args.d is not None:
        tokens = args.d.replace(",", " ").split()
    else:
        with open(args.degrees, "r", encoding="utf-8") as fh:
            tokens = fh.read().split()
    try:
        degrees = [int(tok) for tok in tokens]
    except ValueError:
        raise FactorxError(f"non-integer degree token in {tokens!r}") from None
    if len(degrees) != graph.n:
        raise FactorxError(
            f"got {len(degrees)} degrees for a graph on {graph.n} vertices"
        )
    return degrees


def _flatten(prefix: str, value, out: dict):
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), sub, out)
    elif isinstance(value, (list, tuple)):
        for i, sub in enumerate(value):
            _flatten(f"{prefix}[{i}]", sub, out)
    else:
        out[prefix] = value


def _emit(payload: dict, output: str):
    if output == "json":
        print(json.dumps(payload))
        return
    flat: dict = {}
    _flatten("", payload, flat)
    keys = list(flat.keys())
    print("\t".join(keys))
    print("\t".join(str(flat[k]) for k in keys))


def _cmd_exact(args) -> dict:
    graph = _load_graph(args)
    degrees = _load_degrees(args, graph)
    count = exact.exact_factor_count(graph, degrees, max_states=args.max_states)
    return {"count": str(count)}


def _cmd_estimate(args) -> dict:
    graph = _load_graph(args)
    degrees = _load_degrees(args, graph)
    est = estimate.estimate_log_count(
        graph,
        degrees,
        p=args.p,
        sigma=args.sigma,
        ell0=args.ell0,
        r0=args.r0,
        budget=args.budget,
        beta_source=args.beta,
        tol=args.tol,
    )
    mant, expo = mantissa_exponent(est.log_value)
    return {
        "log_value": est.log_value,
        "mantissa": mant,
        "exponent": expo,
        "breakdown": {
            "log_M": est.breakdown.log_m,
            "gaussian_prefactor": est.breakdown.gaussian_prefactor,
            "kappa": list(est.breakdown.kappa),
        },
        "orders": {
            "ell0": est.orders.ell0,
            "r0": est.orders.r0,
            "p": est.orders.p,
            "sigma": est.orders.sigma,
        },
    }


def _cmd_regular(args) -> dict:
    res = regular.rg_log_expansion(
        args.n, args.d, k=args.k, allow_conjectural=args.conjectural
    )
    mant, expo = mantissa_exponent(res.log_value)
    return {
        "n": args.n,
        "d": args.d,
        "k": res.k,
        "conjectural": res.conjectural,
        "log_value": res.log_value if math.isfinite(res.log_value) else None,
        "mantissa": mant,
        "exponent": expo,
        "terms": list(res.terms),
        "corrections": {
            "eps1": res.corrections.eps1,
            "eps2": res.corrections.eps2,
            "base_log": res.corrections.base_log
            if math.isfinite(res.corrections.base_log)
            else None,
        },
    }


def _cmd_beta(args) -> dict:
    graph = _load_graph(args)
    degrees = _load_degrees(args, graph)
    state = betas.solve_beta(graph, degrees, tol=args.tol, max_iter=args.max_iter)
    res = betas.delta_residual(graph, degrees, state.beta)
    return {
        "beta": [float(b) for b in state.beta],
        "delta_inf": res.inf_norm,
        "delta_one": res.one_norm,
        "lambda_bar": state.lambda_bar,
        "Lambda": state.Lambda,
    }


def _cmd_edgeprob(args) -> dict:
    graph = _load_graph(args)
    degrees = _load_degrees(args, graph)
    u, v = args.u - 1, args.v - 1
    state = betas.solve_beta(graph, degrees, tol=args.tol)
    payload = {
        "u": args.u,
        "v": args.v,
        "estimate": estimate.edge_probability_estimate(graph, degrees, state, u, v),
    }
    if args.exact:
        prob = exact.exact_edge_probability(graph, degrees, u, v)
        payload["exact"] = f"{prob.numerator}/{prob.denominator}"
        payload["exact_float"] = float(prob)
    return payload


def _cmd_check(args) -> dict:
    graph = _load_graph(args)
    degrees = _load_degrees(args, graph)
    params = graphs.AssumptionParams(
        sigma=args.sigma,
        B=args.B,
        C=args.C,
        tau_q=args.tau_q,
        eps=args.eps if args.eps is not None else args.sigma / 32.0,
        p=args.p,
    )
    if args.beta == "solve":
        beta = betas.solve_beta(graph, degrees).beta
    else:
        beta = betas.approx_beta(graph, degrees)
    report = graphs.check_assumptions(graph, degrees, beta, params)
    clauses = {}
    for name in ("d_le_g", "beta_spread", "lambda_lower", "cheeger_and_q", "delta_norms"):
        clause = getattr(report, name)
        clauses[name] = {"passed": clause.passed, **clause.values}
    summary = {"all_pass": report.all_pass, "clauses": clauses}
    print(
        "assumption check: " + ("all clauses pass" if report.all_pass else "FAILED clauses: "
        + ", ".join(n for n in clauses if not clauses[n]["passed"])),
        file=sys.stderr,
    )
    return summary


def _selftest_checks():
    yield "parse_roundtrip", lambda: graphs.parse_edge_list(
        graphs.serialize_edge_list(graphs.complete_graph(5))
    ) == graphs.complete_graph(5)
    yield "exact_rg_5_2", lambda: exact.exact_regular_count(5, 2) == 12
    yield "exact_rg_6_3", lambda: exact.exact_regular_count(6, 3) == 70
    yield "bipartiteness_k5", lambda: abs(
        graphs.algebraic_bipartiteness(graphs.complete_graph(5)) - 3.0
    ) < 1e-9
    yield "cheeger_k4", lambda: graphs.cheeger(graphs.complete_graph(4)).exact == 2.0

    def _taylor():
        b = cumulants.taylor_coefficients(0.3, 4)
        return (
            abs(b[1] - 0.3) < 1e-15
            and abs(b[2] - 0.105) < 1e-15
            and abs(b[4] + 0.002275) < 1e-15
        )

    yield "taylor_coefficients", _taylor

    def _figure_pairing():
        cov = cumulants.overlap_covariance_accessor(-0.25, 0.9, 2.1)
        a, b, c = (0, 1), (1, 2), (2, 3)
        val = cumulants.joint_cumulant([[a] * 3, [b] * 4, [c] * 3], cov)
        s0, s1, s2 = -0.25, 0.9, 2.1
        want = (
            216 * s0**2 * s1**2 * s2
            + 216 * s0 * s1**2 * s2**2
            + 108 * s1**2 * s2**3
            + 216 * s0 * s1**4
            + 144 * s1**4 * s2
        )
        return abs(val - want) < 1e-9 * abs(want)

    yield "connected_pairing_sum", _figure_pairing

    def _beta_solve():
        g = graphs.complete_graph(12)
        state = betas.solve_beta(g, [5] * 12)
        res = betas.delta_residual(g, [5] * 12, state.beta)
        return res.inf_norm < 1e-10

    yield "beta_newton_k12", _beta_solve

    def _table_row():
        res = regular.rg_log_expansion(37, 18, k=7)
        mant, expo = mantissa_exponent(res.log_value)
        return mant == "1.6237815979" and expo == 168

    yield "regular_expansion_row_k7", _table_row

    def _estimate_sane():
        g = graphs.complete_graph(8)
        est = estimate.estimate_log_count(g, [4] * 8, ell0=4, r0=2)
        truth = exact.exact_regular_count(8, 4)
        return abs(est.log_value - math.log(truth)) < 0.5

    yield "estimate_vs_exact_k8", _estimate_sane


def _cmd_selftest(args) -> tuple[dict, int]:
    checks = []
    failed = 0
    for name, fn in _selftest_checks():
        try:
            ok = bool(fn())
        except Exception as exc:  # noqa: BLE001 - report, do not crash the suite
            ok = False
            print(f"selftest {name}: raised {exc!r}", file=sys.stderr)
        checks.append({"name": name, "ok": ok})
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
        if not ok:
            failed += 1
    payload = {
        "passed": len(checks) - failed,
        "failed": failed,
        "checks": checks,
    }
    return payload, (1 if failed else 0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factorx",
        description="Exact and asymptotic counting of degree-constrained subgraphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_exact = sub.add_parser("exact", help="exact big-integer factor count")
    _add_graph_args(p_exact)
    _add_degree_args(p_exact)
    p_exact.add_argument("--max-states", type=int, default=exact.DEFAULT_STATE_BUDGET)
    _add_common_output(p_exact)

    p_est = sub.add_parser("estimate", help="cumulant-expansion estimate")
    _add_graph_args(p_est)
    _add_degree_args(p_est)
    p_est.add_argument("--p", type=float, default=1.0)
    p_est.add_argument("--sigma", type=float, default=None)
    p_est.add_argument("--ell0", type=int, default=None)
    p_est.add_argument("--r0", type=int, default=None)
    p_est.add_argument("--budget", type=int, default=cumulants.DEFAULT_TUPLE_BUDGET)
    p_est.add_argument("--beta", choices=("solve", "approx"), default="solve")
    p_est.add_argument("--tol", type=float, default=1e-10)
    _add_common_output(p_est)

    p_reg = sub.add_parser("regular", help="closed-form regular-graph expansion")
    p_reg.add_argument("--n", type=int, required=True)
    p_reg.add_argument("--d", type=int, required=True)
    p_reg.add_argument("--k", type=int, default=7)
    p_reg.add_argument("--conjectural", action="store_true")
    _add_common_output(p_reg)

    p_beta = sub.add_parser("beta", help="solve the degree-fitting equations")
    _add_graph_args(p_beta)
    _add_degree_args(p_beta)
    p_beta.add_argument("--tol", type=float, default=1e-10)
    p_beta.add_argument("--max-iter", type=int, default=50)
    _add_common_output(p_beta)

    p_edge = sub.add_parser("edgeprob", help="edge probability in a random factor")
    _add_graph_args(p_edge)
    _add_degree_args(p_edge)
    p_edge.add_argument("--u", type=int, required=True, help="1-based endpoint")
    p_edge.add_argument("--v", type=int, required=True, help="1-based endpoint")
    p_edge.add_argument("--exact", action="store_true", help="also compute the exact rational")
    p_edge.add_argument("--tol", type=float, default=1e-10)
    _add_common_output(p_edge)

    p_check = sub.add_parser("check", help="evaluate the density/expansion assumptions")
    _add_graph_args(p_check)
    _add_degree_args(p_check)
    p_check.add_argument("--sigma", type=float, default=1.0)
    p_check.add_argument("--B", type=float, default=0.1)
    p_check.add_argument("--C", type=float, default=2.0)
    p_check.add_argument("--tau-q", dest="tau_q", type=float, default=0.1)
    p_check.add_argument("--eps", type=float, default=None)
    p_check.add_argument("--p", type=float, default=1.0)
    p_check.add_argument("--beta", choices=("solve", "approx"), default="approx")
    _add_common_output(p_check)

    p_self = sub.add_parser("selftest", help="run the built-in acceptance subset")
    _add_common_output(p_self)

    return parser


_COMMANDS = {
    "exact": _cmd_exact,
    "estimate": _cmd_estimate,
    "regular": _cmd_regular,
    "beta": _cmd_beta,
    "edgeprob": _cmd_edgeprob,
    "check": _cmd_check,
}


def run(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        if args.command == "selftest":
            payload, code = _cmd_selftest(args)
            _emit(payload, args.output)
            return code
        payload = _COMMANDS[args.command](args)
        _emit(payload, args.output)
        return 0
    except FactorxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
