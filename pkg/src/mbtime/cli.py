"""Command-line surface: bounds, solve, heuristic, bench, generate, export-lp.

Set MBT_SOLVER_CMD to route MIP/LP solves through an external solver binary
(template placeholders: {lp}, {sol}, {timelimit}); the default is the
in-process HiGHS backend.
"""

from __future__ import annotations

import argparse
import glob
import os
import sys

from . import bench as bench_mod
from .graph import (GeneratorConfig, Instance, ParseError, ValidationError,
                    check_instance, generate_random, load_instance,
                    write_edgelist, write_stp)
from .heuristic import MATCHERS, LookaheadConfig, construct
from .milp import (build_decision_model, build_makespan_model,
                   build_optimization_model, export_lp)
from .schedule import format_schedule
from .exact import solve_exact
from .solvers import SOLVER_ENV_VAR, solver_from_env


def _add_instance_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?",
                        help="instance file (.stp or plain edge list); "
                             "omit to generate with --n/--p/--sigma/--seed")
    parser.add_argument("--n", type=int, help="random instance: node count")
    parser.add_argument("--p", type=float, default=0.0,
                        help="random instance: extra edge probability")
    parser.add_argument("--sigma", type=int, default=1,
                        help="random instance: source count")
    parser.add_argument("--seed", type=int, default=0,
                        help="random instance: generator seed")
    parser.add_argument("--sources",
                        help="comma-separated source ids overriding the file")


def _resolve_instance(args) -> Instance:
    sources = None
    if args.sources:
        sources = tuple(int(x) for x in args.sources.split(","))
    if args.input:
        return load_instance(args.input, sources=sources)
    if args.n is None:
        raise ValueError("either an input file or --n is required")
    inst = generate_random(GeneratorConfig(args.n, args.p, args.sigma,
                                           args.seed))
    if sources:
        inst = check_instance(Instance(inst.graph, sources, inst.name))
    return inst


def _write_output(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_ks(spec: str) -> tuple[int, ...]:
    return tuple(int(x) for x in spec.split(",") if x.strip())


def _bench_config(args) -> bench_mod.BenchConfig:
    return bench_mod.BenchConfig(
        ks=_parse_ks(args.ks),
        with_lp=args.lp,
        with_opt=args.opt,
        time_limit=args.time_limit,
        start_from=args.start_from,
        solver_command=os.environ.get(SOLVER_ENV_VAR, "").strip() or None)


def _row_table(row: bench_mod.BenchRow) -> str:
    lines = []
    for name in bench_mod.BENCH_COLUMNS:
        value = getattr(row, name)
        if value is None:
            continue
        lines.append(f"{name:>16}  {bench_mod._cell(value)}")
    return "\n".join(lines) + "\n"


def cmd_generate(args) -> int:
    inst = generate_random(GeneratorConfig(args.n, args.p, args.sigma,
                                           args.seed))
    text = write_stp(inst) if args.format == "stp" else write_edgelist(inst)
    _write_output(text, args.output)
    return 0


def cmd_bounds(args) -> int:
    inst = _resolve_instance(args)
    cfg = _bench_config(args)
    row = bench_mod.bench_instance((inst, args.p_label or "-", cfg))
    if args.format == "csv":
        sys.stdout.write(bench_mod.rows_to_csv([row]))
    else:
        sys.stdout.write(_row_table(row))
    return 0


def cmd_solve(args) -> int:
    inst = _resolve_instance(args)
    solver = solver_from_env(time_limit=args.time_limit)
    outcome = solve_exact(inst, solver, time_limit=args.time_limit,
                          start_from=args.start_from)
    if outcome.status == "Optimal":
        print(f"OPT {outcome.tau}")
    elif outcome.status == "LowerBoundOnly":
        print(f"LB {outcome.tau} (interrupted)")
    else:
        print(f"ERROR at t={outcome.tau}: {outcome.message}", file=sys.stderr)
        return 1
    if args.verbose:
        for t, value in outcome.iterations:
            print(f"  t={t}: decision optimum {value}")
        print(f"  elapsed {outcome.elapsed:.3f}s")
    if args.emit_schedule and outcome.schedule is not None:
        _write_output(format_schedule(outcome.schedule), args.emit_schedule)
    return 0


def cmd_heuristic(args) -> int:
    inst = _resolve_instance(args)
    solver = solver_from_env(time_limit=args.time_limit) if args.k >= 2 else None
    sched = construct(inst, LookaheadConfig(k=args.k, matcher=args.matcher,
                                            solver=solver,
                                            time_limit=args.time_limit))
    print(f"UB {len(sched)} (k={args.k})")
    if args.emit_schedule:
        _write_output(format_schedule(sched), args.emit_schedule)
    return 0


def cmd_bench(args) -> int:
    cfg = _bench_config(args)
    if args.dataset:
        paths = sorted(
            p for p in glob.glob(os.path.join(args.dataset, "*"))
            if os.path.isfile(p))
        select = None
        if args.select:
            a, _, b = args.select.partition(":")
            select = (int(a), int(b))
        sources = None
        if args.sources:
            sources = tuple(int(x) for x in args.sources.split(","))
        items = bench_mod.dataset_items(paths, select=select, sources=sources)
    else:
        if not args.n_list:
            raise ValueError("either --dataset or --n-list is required")
        items = bench_mod.sweep_items(
            [int(x) for x in args.n_list.split(",")],
            [float(x) for x in args.p_list.split(",")],
            args.sigma, args.count, args.seed0)
    rows = bench_mod.run_bench(items, cfg, jobs=args.jobs)
    aggregates = bench_mod.aggregate_rows(rows)
    _write_output(bench_mod.rows_to_csv(rows, aggregates), args.output)
    return 0


def cmd_export_lp(args) -> int:
    inst = _resolve_instance(args)
    builders = {"opt": build_optimization_model,
                "dec": build_decision_model,
                "makespan": build_makespan_model}
    if args.model == "dec" and args.literal:
        model = build_decision_model(inst, args.t, include_capacity=False)
    else:
        model = builders[args.model](inst, args.t)
    if args.relaxed:
        model = model.relaxation()
    _write_output(export_lp(model), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbtime",
        description="Bounds, heuristics, and exact solves for minimum "
                    "broadcast time.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--sigma", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("edgelist", "stp"), default="edgelist")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bounds", help="bound report for one instance")
    _add_instance_args(p)
    p.add_argument("--ks", default="1", help="lookahead values, e.g. 4,3,2,1")
    p.add_argument("--lp", action="store_true", help="include the LP bound")
    p.add_argument("--opt", action="store_true", help="include the exact MIP")
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--start-from", choices=("deg", "lp"), default="deg")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--p-label", help="value for the p_or_dataset column")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("solve", help="exact broadcast time")
    _add_instance_args(p)
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--start-from", choices=("deg", "lp"), default="deg")
    p.add_argument("--emit-schedule", metavar="PATH",
                   help="write the witness schedule ('-' for stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("heuristic", help="construct a feasible schedule")
    _add_instance_args(p)
    p.add_argument("--k", type=int, default=1, help="lookahead horizon")
    p.add_argument("--matcher", choices=MATCHERS, default="cardinality")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--emit-schedule", metavar="PATH")
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("bench", help="benchmark sweep or dataset run")
    p.add_argument("--dataset", help="directory of instance files")
    p.add_argument("--select", metavar="N:M",
                   help="keep only dataset instances with exactly N nodes "
                        "and M edges")
    p.add_argument("--sources", help="source override for dataset files")
    p.add_argument("--n-list", help="comma-separated node counts")
    p.add_argument("--p-list", default="0", help="comma-separated p values")
    p.add_argument("--sigma", type=int, default=1)
    p.add_argument("--count", type=int, default=1,
                   help="instances per (n, p) cell")
    p.add_argument("--seed0", type=int, default=0, help="first seed")
    p.add_argument("--ks", default="4,3,2,1")
    p.add_argument("--lp", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--opt", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--start-from", choices=("deg", "lp"), default="deg")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-lp", help="write a model as LP text")
    _add_instance_args(p)
    p.add_argument("--model", choices=("opt", "dec", "makespan"),
                   default="opt")
    p.add_argument("--t", type=int, required=True, help="horizon")
    p.add_argument("--relaxed", action="store_true",
                   help="drop integrality (continuous relaxation)")
    p.add_argument("--literal", action="store_true",
                   help="decision model without the per-round capacity rows")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_export_lp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
