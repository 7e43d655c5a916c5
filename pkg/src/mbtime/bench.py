"""Benchmark harness: per-instance bound/solve rows and per-group averages.

A row records every bound with its wall time. When the degree bound meets the
UB-4 heuristic value the optimum is already known ("bounds collapse") and the
MIP is skipped; interrupted exact solves report certified lower bounds and
count as interrupted. Group aggregates mirror that bookkeeping: means over
the rows, the interruption percentage among rows where the MIP actually ran,
and the collapse count.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

from .bounds import best_combinatorial_lower, degree_bound, fibonacci_bound
from .exact import solve_exact
from .graph import (GeneratorConfig, Instance, generate_random,
                    load_instance, ordered_degree_sequence)
from .heuristic import upper_bound_suite
from .milp import BoundSearchTimeout, lp_tstar
from .solvers import ScipySolver, SubprocessSolver


@dataclass
class BenchRow:
    instance: str
    n: int
    m: int
    sigma: int
    p_or_dataset: str
    fib: int | None
    deg: int | None
    lp: int | None
    opt: int | None
    opt_status: str
    ub_4: int | None
    ub_3: int | None
    ub_2: int | None
    ub_1: int | None
    fib_s: float
    deg_s: float
    lp_s: float | None
    opt_s: float | None
    ub_4_s: float | None
    ub_3_s: float | None
    ub_2_s: float | None
    ub_1_s: float | None
    interrupted: bool
    bounds_collapsed: bool


BENCH_COLUMNS = [f.name for f in fields(BenchRow)]


@dataclass
class BenchConfig:
    ks: tuple[int, ...] = (4, 3, 2, 1)
    with_lp: bool = True
    with_opt: bool = True
    time_limit: float = 3600.0
    start_from: str = "deg"
    solver_command: str | None = None  # None: in-process HiGHS

    def make_solver(self):
        if self.solver_command:
            return SubprocessSolver(self.solver_command,
                                    time_limit=self.time_limit)
        return ScipySolver(time_limit=self.time_limit)


def bench_instance(item: tuple[Instance, str, BenchConfig]) -> BenchRow:
    inst, p_or_dataset, cfg = item
    solver = cfg.make_solver()
    n, sigma = inst.n, inst.sigma

    start = time.perf_counter()
    fib = fibonacci_bound(n, sigma, max(inst.graph.max_degree, 1))
    fib_s = time.perf_counter() - start
    start = time.perf_counter()
    deg_value = degree_bound(sigma, ordered_degree_sequence(inst))
    deg = int(deg_value)
    deg_s = time.perf_counter() - start

    ub_report, ub_schedules = upper_bound_suite(
        inst, cfg.ks, solver=solver, time_limit=cfg.time_limit)
    ub_vals: dict[int, int | None] = {}
    ub_secs: dict[int, float | None] = {}
    for k in (4, 3, 2, 1):
        entry = ub_report.entries.get(f"ub_{k}")
        ub_vals[k] = entry.value if entry else None
        ub_secs[k] = entry.elapsed if entry else None

    computed = [v for v in ub_vals.values() if v is not None]
    if ub_vals[4] is not None:
        collapsed = deg == ub_vals[4]
    else:
        collapsed = bool(computed) and deg == min(computed)

    lp = lp_s = None
    if cfg.with_lp:
        seed_t, _ = best_combinatorial_lower(inst)
        start = time.perf_counter()
        try:
            lp = lp_tstar(inst, solver, t_start=seed_t)
            lp_status_ok = True
        except BoundSearchTimeout as exc:
            lp = exc.certified_lower
            lp_status_ok = False
        lp_s = time.perf_counter() - start
    else:
        lp_status_ok = True

    interrupted = False
    opt = opt_s = None
    opt_status = "skipped"
    if collapsed:
        opt, opt_s, opt_status = deg, 0.0, "collapsed"
    elif cfg.with_opt:
        best_k = None
        for k in cfg.ks:
            v = ub_vals.get(k)
            if v is not None and (best_k is None or v < ub_vals[best_k]):
                best_k = k
        kwargs = {}
        if best_k is not None:
            kwargs = {"upper_bound": ub_vals[best_k],
                      "upper_schedule": ub_schedules[best_k]}
        outcome = solve_exact(inst, solver, time_limit=cfg.time_limit,
                              start_from=cfg.start_from, **kwargs)
        opt, opt_s = outcome.tau, outcome.elapsed
        if outcome.status == "Optimal":
            opt_status = "optimal"
        elif outcome.status == "LowerBoundOnly":
            opt_status = "interrupted"
            interrupted = True
        else:
            opt_status = "error"
    if not lp_status_ok:
        interrupted = True

    return BenchRow(
        instance=inst.name or "unnamed", n=n, m=inst.graph.edge_count,
        sigma=sigma, p_or_dataset=p_or_dataset,
        fib=fib, deg=deg, lp=lp, opt=opt, opt_status=opt_status,
        ub_4=ub_vals[4], ub_3=ub_vals[3], ub_2=ub_vals[2], ub_1=ub_vals[1],
        fib_s=fib_s, deg_s=deg_s, lp_s=lp_s, opt_s=opt_s,
        ub_4_s=ub_secs[4], ub_3_s=ub_secs[3], ub_2_s=ub_secs[2],
        ub_1_s=ub_secs[1],
        interrupted=interrupted, bounds_collapsed=collapsed)


def run_bench(items: Sequence[tuple[Instance, str]], cfg: BenchConfig,
              jobs: int = 1) -> list[BenchRow]:
    work = [(inst, tag, cfg) for inst, tag in items]
    if jobs <= 1 or len(work) <= 1:
        return [bench_instance(item) for item in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(bench_instance, work))


def sweep_items(n_list: Iterable[int], p_list: Iterable[float], sigma: int,
                count: int, seed0: int = 0) -> list[tuple[Instance, str]]:
    items = []
    for n in n_list:
        for p in p_list:
            for i in range(count):
                inst = generate_random(GeneratorConfig(n, p, sigma, seed0 + i))
                items.append((inst, f"p={p:g}"))
    return items


def dataset_items(paths: Sequence[str],
                  select: tuple[int, int] | None = None,
                  sources: Sequence[int] | None = None
                  ) -> list[tuple[Instance, str]]:
    """Load instance files, optionally keeping only exact (n, |E|) matches."""
    items = []
    for path in sorted(paths):
        inst = load_instance(path, sources=sources)
        if select is not None and (inst.n, inst.graph.edge_count) != select:
            continue
        items.append((inst, f"m={inst.graph.edge_count}"))
    return items


# --- aggregation and CSV -----------------------------------------------------

_MEAN_FIELDS = ["fib", "deg", "lp", "opt", "ub_4", "ub_3", "ub_2", "ub_1",
                "fib_s", "deg_s", "lp_s", "opt_s",
                "ub_4_s", "ub_3_s", "ub_2_s", "ub_1_s"]


def aggregate_rows(rows: Sequence[BenchRow]) -> list[dict]:
    """One summary dict per (n, p_or_dataset) group, in first-seen order."""
    groups: dict[tuple[int, str], list[BenchRow]] = {}
    for row in rows:
        groups.setdefault((row.n, row.p_or_dataset), []).append(row)
    out = []
    for (n, tag), members in groups.items():
        summary: dict[str, object] = {
            "instance": f"mean[n={n},{tag}]",
            "n": n,
            "m": sum(r.m for r in members) / len(members),
            "sigma": members[0].sigma,
            "p_or_dataset": tag,
            "opt_status": "",
        }
        for name in _MEAN_FIELDS:
            values = [getattr(r, name) for r in members
                      if getattr(r, name) is not None]
            summary[name] = sum(values) / len(values) if values else None
        solved = [r for r in members if not r.bounds_collapsed]
        pct = (100.0 * sum(r.interrupted for r in solved) / len(solved)
               if solved else 0.0)
        summary["interrupted"] = pct
        summary["bounds_collapsed"] = sum(r.bounds_collapsed for r in members)
        out.append(summary)
    return out


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def rows_to_csv(rows: Sequence[BenchRow],
                aggregates: Sequence[dict] = ()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow([_cell(getattr(row, name)) for name in BENCH_COLUMNS])
    for summary in aggregates:
        writer.writerow([_cell(summary.get(name)) for name in BENCH_COLUMNS])
    return buf.getvalue()
