"""Command line entry point.

Exit codes: 0 success, 1 violated invariant (an inequality check reported
violations), 2 usage error (bad flags, missing files, bad parameters),
3 node budget exhausted before the search finished.

Machine-readable output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction

from forestkit import bounds, forests, harness, moments
from forestkit.graph import GraphError, parse_graph_text
from forestkit.solver import SolverError, solve_max

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


def _parse_p(text: str) -> Fraction:
    try:
        p = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad probability {text!r}") from exc
    if not (0 < p < 1):
        raise UsageError(f"p must be in (0, 1), got {text}")
    return p


def _emit(rows, columns, fmt):
    if fmt == "json":
        print(json.dumps(rows, indent=2))
    else:
        print(",".join(columns))
        for row in rows:
            print(",".join(str(row[c]) for c in columns))


# -- subcommands ---------------------------------------------------------------


def cmd_count_forests(args) -> int:
    if args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    p = _parse_p(args.p) if args.p is not None else None
    ells = [args.ell] if args.ell is not None else list(range(1, args.k + 1))
    rows = []
    for ell in ells:
        row = {"k": args.k, "ell": ell, "phi": str(forests.phi(args.k, ell))}
        if p is not None:
            row["g"] = forests.g_value(args.k, ell, p).to_float()
            row["g_limit"] = forests.g_limit(ell, p)
        rows.append(row)
    columns = ["k", "ell", "phi"] + (["g", "g_limit"] if p is not None else [])
    _emit(rows, columns, args.format)
    return EXIT_OK


def cmd_expectation(args) -> int:
    p = _parse_p(args.p)
    try:
        q = moments.MomentQuery(n=args.n, p=p, eps=args.eps, K=args.K)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = moments.expected_forest_count(q)
    rows = [
        {
            "n": q.n, "p": args.p, "eps": args.eps, "K": q.K, "ell": ell,
            "log_E_Y_ell": ey.log if not ey.zero else "-inf",
            "log_E_X": report.e_x.log,
            "ratio": report.ratio,
            "limit_ratio": report.limit_ratio,
        }
        for ell, ey in enumerate(report.e_y_by_ell, start=1)
    ]
    if args.format == "json":
        payload = {
            "query": {"n": q.n, "p": args.p, "eps": args.eps, "K": q.K},
            "log_E_X": report.e_x.log,
            "log_E_Y": report.e_y.log,
            "ratio": report.ratio,
            "ratio_direct": report.ratio_direct,
            "limit_ratio": report.limit_ratio,
            "upper_bound_certified": report.upper_bound_certified,
            "per_ell": rows,
        }
        print(json.dumps(payload, indent=2))
    else:
        _emit(rows, ["n", "p", "eps", "K", "ell", "log_E_Y_ell", "log_E_X", "ratio", "limit_ratio"], "csv")
    return EXIT_OK


def cmd_concentration_points(args) -> int:
    p = _parse_p(args.p)
    k_low, k_high = moments.concentration_points(args.n, p, args.eps)
    rows = [{"n": args.n, "p": args.p, "eps": args.eps, "k_low": k_low, "k_high": k_high}]
    _emit(rows, ["n", "p", "eps", "k_low", "k_high"], args.format)
    return EXIT_OK


def cmd_verify_inequalities(args) -> int:
    p_values = [_parse_p(s) for s in args.p.split(",")] if args.p else [Fraction(1, 2)]
    reports = [
        bounds.check_stirling_sandwich(min(args.kmax, 300)),
        bounds.check_f_upper_bound(args.kmax),
        bounds.check_convexity_integral_bound(args.kmax),
        bounds.check_sum_f_bound(args.kmax),
    ]
    m_ell = {
        str(float(p)): [asdict(bounds.estimate_M_ell(ell, p, k_max=args.kmax)) for ell in range(1, 11)]
        for p in p_values
    }
    payload = {
        "reports": [asdict(r) for r in reports],
        "M_ell": m_ell,
        "violations_total": sum(len(r.violations) for r in reports),
    }
    print(json.dumps(payload, indent=2, default=str))
    return EXIT_OK if payload["violations_total"] == 0 else EXIT_VIOLATION


def cmd_solve(args) -> int:
    try:
        with open(args.graph) as fh:
            g = parse_graph_text(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read graph file {args.graph}: {exc}") from exc
    result = solve_max(args.mode, g, budget=args.budget)
    payload = {
        "mode": result.mode,
        "size": result.size,
        "witness": sorted(v for v in range(g.n) if result.witness >> v & 1),
        "nodes_explored": result.nodes_explored,
        "status": "complete" if result.complete else "incomplete",
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK if result.complete else EXIT_BUDGET


def cmd_simulate(args) -> int:
    try:
        cfg = harness.load_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    def progress(n, p_str, t, total):
        print(f"cell n={n} p={p_str}: trial {t + 1}/{total}", file=sys.stderr)
    try:
        summaries, records = harness.run_experiment(cfg, verify=args.verify, progress=progress if args.progress else None)
    except harness.CellAborted as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    print(json.dumps([s.as_dict() for s in summaries], indent=2))
    print(f"wrote {len(records)} records to {cfg.output}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        records = harness.load_records(args.records)
    except OSError as exc:
        raise UsageError(f"cannot read records {args.records}: {exc}") from exc
    payload = {"cells": [s.as_dict() for s in harness.summarize(records)]}
    if args.eps_grid:
        try:
            grid = [float(x) for x in args.eps_grid.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --eps-grid {args.eps_grid!r}") from exc
        payload["epsilon_sweep"] = harness.sweep_epsilon(records, grid)
    if args.plot:
        payload["plots"] = _write_plots(records, args.plot)
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _write_plots(records, out_dir: str):
    import os

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for summary in harness.summarize(records):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        values = sorted(summary.f_distribution)
        ax.bar(values, [summary.f_distribution[v] for v in values])
        ax.set_xlabel("maximum induced forest size")
        ax.set_ylabel("trials")
        ax.set_title(f"n={summary.n}, p={summary.p} ({summary.trials} trials)")
        path = os.path.join(out_dir, f"hist_n{summary.n}_p{summary.p.replace('.', '_')}.png")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forestkit",
        description="Induced-forest concentration toolkit: exact counts, moments, bound checks, solver, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cf = sub.add_parser("count-forests", help="exact labeled forest counts phi(k, ell) and g values")
    p_cf.add_argument("--k", type=int, required=True, help="number of labeled vertices")
    p_cf.add_argument("--ell", type=int, default=None, help="component count; all of 1..k when omitted")
    p_cf.add_argument("--p", default=None, help="edge probability for the g columns (decimal or fraction)")
    p_cf.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p_cf.set_defaults(func=cmd_count_forests)

    p_ex = sub.add_parser("expectation", help="first moments E[X_n], E[Y_n] at the critical size")
    p_ex.add_argument("--n", type=int, required=True, help="number of graph vertices")
    p_ex.add_argument("--p", required=True, help="edge probability (decimal or fraction)")
    p_ex.add_argument("--eps", type=float, default=0.0, help="epsilon offset in the critical-size formula")
    p_ex.add_argument("--K", type=int, default=None, help="override the derived target size")
    p_ex.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p_ex.set_defaults(func=cmd_expectation)

    p_cp = sub.add_parser("concentration-points", help="the two predicted values of the maximum size")
    p_cp.add_argument("--n", type=int, required=True, help="number of graph vertices")
    p_cp.add_argument("--p", required=True, help="edge probability (decimal or fraction)")
    p_cp.add_argument("--eps", type=float, default=0.0, help="epsilon offset")
    p_cp.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p_cp.set_defaults(func=cmd_concentration_points)

    p_vi = sub.add_parser("verify-inequalities", help="numerically check every inequality of the bound proof")
    p_vi.add_argument("--kmax", type=int, default=200, help="grid size for the sweeps")
    p_vi.add_argument("--p", default=None, help="comma-separated probabilities for the M_ell estimates")
    p_vi.add_argument("--format", choices=("json",), default="json", help="output format (json only)")
    p_vi.set_defaults(func=cmd_verify_inequalities)

    p_sv = sub.add_parser("solve", help="exact maximum induced forest or tree of a graph file")
    p_sv.add_argument("--mode", choices=("forest", "tree"), required=True, help="structure to maximize")
    p_sv.add_argument("--graph", required=True, help="graph file: first line 'n m', then edge lines 'u v'")
    p_sv.add_argument("--budget", type=int, default=10**8, help="node budget before giving up")
    p_sv.set_defaults(func=cmd_solve)

    p_sim = sub.add_parser("simulate", help="run the Monte Carlo concentration experiment")
    p_sim.add_argument("--config", required=True, help="TOML config with n_list, p_list, trials, ...")
    p_sim.add_argument("--verify", action="store_true", help="re-validate every witness via the graph predicates")
    p_sim.add_argument("--progress", action="store_true", help="print per-trial progress to stderr")
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("report", help="summarize a records CSV; optional epsilon sweep and plots")
    p_rep.add_argument("--records", required=True, help="records CSV written by simulate")
    p_rep.add_argument("--eps-grid", default=None, help="comma-separated epsilon values to sweep")
    p_rep.add_argument("--plot", default=None, help="directory for per-cell histograms")
    p_rep.add_argument("--format", choices=("json",), default="json", help="output format (json only)")
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    import os
    threads = os.environ.get("FORESTKIT_THREADS")
    if threads is not None:
        try:
            import numba
            numba.set_num_threads(int(threads))
        except (ImportError, ValueError) as exc:
            print(f"error: bad FORESTKIT_THREADS={threads!r}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, SolverError, harness.HarnessError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
