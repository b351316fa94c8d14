"""Benchmark harness: run the built-in problems and check them against their references.

Exit status: 0 every run reproduced its reference, 1 a reference was missed,
2 usage error (unknown problem, invalid configuration), 3 evaluator failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .benchmarks import REGISTRY, UnknownProblemError, get_problem
from .driver import OptimizationError, optimize
from .problem import SolverConfig, validate

EXIT_OK = 0
EXIT_REFERENCE_MISS = 1
EXIT_USAGE = 2
EXIT_EVALUATOR = 3

MAX_VIOLATION = 1e-3
TRACE_HEADER = ("iter", "cost", "step_norm", "max_eq_residual", "max_ineq_value")

_OVERRIDE_FLAGS = {
    "max_iter": "max_iter",
    "step_tol": "step_tol",
    "cost_tol": "cost_tol",
    "initial_step": "initial_step_length",
    "step_multiplier": "step_multiplier",
}


class UsageError(Exception):
    pass


@dataclass
class RunRequest:
    problem_id: str
    config_overrides: dict = field(default_factory=dict)
    output_format: str = "human"
    trace_path: Optional[str] = None
    plot_path: Optional[str] = None


def _fmt(value):
    return "nan" if isinstance(value, float) and math.isnan(value) else f"{value:.15g}"


def write_trace(records, path):
    """Write one CSV row per outer iteration, with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for r in records:
            writer.writerow(
                [r.iteration, _fmt(r.cost), _fmt(r.step_norm), _fmt(r.max_eq_residual), _fmt(r.max_ineq_value)]
            )


def _config(overrides):
    try:
        return SolverConfig().replace(**overrides)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _resolve(problem_id, config):
    try:
        bench = get_problem(problem_id)
    except UnknownProblemError as exc:
        raise UsageError(str(exc)) from None
    result = validate(bench.description, config)
    if not result:
        raise UsageError(f"invalid configuration: {result.field}: {result.message}")
    return bench


def _solve(bench, config, trace=False):
    """Run one benchmark; returns ``(summary dict, report)``."""
    report = optimize(bench.description, bench.x0, config, trace=trace)
    distance = bench.distance_to_reference(report.x_star)
    passed = distance <= bench.tol_ref and report.max_violation <= MAX_VIOLATION
    summary = {
        "problem_id": bench.id,
        "x_star": report.x_star.tolist(),
        "cost_final": report.cost_final,
        "outer_iterations": report.outer_iterations,
        "exit_reason": report.exit_reason.value,
        "equality_residuals": report.equality_residuals.tolist(),
        "inequality_values": report.inequality_values.tolist(),
        "evaluation_counts": dict(report.evaluation_counts),
        "wall_time_us": report.wall_time * 1e6,
        "passed": bool(passed),
        "max_violation": report.max_violation,
        "distance_to_reference": distance,
    }
    return summary, report


def _print_human(summary, out):
    width = max(len(k) for k in summary)
    for key, value in summary.items():
        if isinstance(value, list):
            value = "[" + ", ".join(f"{v:.6g}" for v in value) + "]"
        elif isinstance(value, float):
            value = f"{value:.6g}"
        print(f"{key:<{width}}  {value}", file=out)


def run(request: RunRequest, out=None, err=None) -> int:
    """Optimize one registry problem and report it."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        config = _config(request.config_overrides)
        bench = _resolve(request.problem_id, config)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE

    want_trace = request.trace_path is not None or request.plot_path is not None
    try:
        summary, report = _solve(bench, config, trace=want_trace)
    except OptimizationError as exc:
        print(f"error: {exc}", file=err)
        if request.output_format == "json":
            payload = {
                "problem_id": bench.id,
                "error": str(exc),
                "iteration": exc.iteration,
                "x_partial": exc.x.tolist(),
                "passed": False,
            }
            print(json.dumps(payload), file=out)
        return EXIT_EVALUATOR

    if request.trace_path is not None:
        write_trace(report.trace, request.trace_path)
    if request.plot_path is not None:
        from .plotting import plot_trace

        plot_trace(report.trace, request.plot_path, title=bench.id)

    if request.output_format == "json":
        print(json.dumps(summary), file=out)
    else:
        _print_human(summary, out)
    return EXIT_OK if summary["passed"] else EXIT_REFERENCE_MISS


def run_all(config_overrides=None, output_format="human", plot_dir=None, out=None, err=None) -> int:
    """Run every registry problem in order and print one row per problem.

    The configuration is validated against all problems before anything runs.
    """
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        config = _config(config_overrides or {})
        benches = [_resolve(pid, config) for pid in REGISTRY]
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE

    rows = []
    status = EXIT_OK
    for bench in benches:
        try:
            summary, report = _solve(bench, config, trace=plot_dir is not None)
        except OptimizationError as exc:
            print(f"error: {bench.id}: {exc}", file=err)
            rows.append({"problem_id": bench.id, "error": str(exc), "passed": False})
            status = EXIT_EVALUATOR
            continue
        if plot_dir is not None:
            from .plotting import plot_trace

            plot_trace(report.trace, Path(plot_dir) / f"{bench.id}.png", title=bench.id)
        rows.append(summary)
        if not summary["passed"] and status == EXIT_OK:
            status = EXIT_REFERENCE_MISS

    if output_format == "json":
        print(json.dumps({"problems": rows, "passed": status == EXIT_OK}), file=out)
    else:
        header = f"{'problem':<16} {'iters':>6} {'cost':>12} {'max_resid':>10} {'dist_ref':>10} {'time_us':>10}  status"
        print(header, file=out)
        for row in rows:
            if "error" in row:
                print(f"{row['problem_id']:<16} {'evaluator failure':>52}  FAIL", file=out)
                continue
            print(
                f"{row['problem_id']:<16} {row['outer_iterations']:>6d} {row['cost_final']:>12.6g} "
                f"{row['max_violation']:>10.2e} {row['distance_to_reference']:>10.2e} "
                f"{row['wall_time_us']:>10.0f}  {'pass' if row['passed'] else 'FAIL'}",
                file=out,
            )
    return status


def list_problems(out=None) -> int:
    out = out or sys.stdout
    for pid in REGISTRY:
        d = get_problem(pid).description
        print(f"{pid:<16} n={d.dimension} n_eq={d.num_equality} n_ineq={d.num_inequality}", file=out)
    return EXIT_OK


def _add_overrides(parser):
    parser.add_argument("--max-iter", type=int, help="outer-iteration cap")
    parser.add_argument("--step-tol", type=float, help="exit when the outer step norm falls below this")
    parser.add_argument("--cost-tol", type=float, help="exit when the cost pass changes the cost by less than this")
    parser.add_argument("--initial-step", type=float, help="first line-search step length")
    parser.add_argument("--step-multiplier", type=float, help="line-search growth factor (> 1)")


def _overrides(args):
    return {field_: getattr(args, flag) for flag, field_ in _OVERRIDE_FLAGS.items() if getattr(args, flag) is not None}


def build_parser():
    parser = argparse.ArgumentParser(prog="nsopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="optimize one built-in problem")
    p_run.add_argument("problem_id")
    _add_overrides(p_run)
    p_run.add_argument("--json", action="store_true", help="print a single JSON object")
    p_run.add_argument("--trace", metavar="PATH", help="write a per-iteration CSV trace")
    p_run.add_argument("--plot", metavar="PATH", help="render a convergence figure (png/pdf/svg)")

    p_all = sub.add_parser("run-all", help="optimize every built-in problem")
    _add_overrides(p_all)
    p_all.add_argument("--json", action="store_true", help="print a single JSON object")
    p_all.add_argument("--plot-dir", metavar="DIR", help="write one convergence figure per problem")

    sub.add_parser("list", help="list the built-in problems")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        return list_problems()
    if args.command == "run":
        request = RunRequest(
            problem_id=args.problem_id,
            config_overrides=_overrides(args),
            output_format="json" if args.json else "human",
            trace_path=args.trace,
            plot_path=args.plot,
        )
        return run(request)
    return run_all(_overrides(args), "json" if args.json else "human", plot_dir=args.plot_dir)


if __name__ == "__main__":
    sys.exit(main())
