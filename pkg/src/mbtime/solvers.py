"""Solver backends behind a small capability-based interface.

ScipySolver runs HiGHS in process via scipy.optimize.milp. SubprocessSolver
shells out to any LP-file-reading solver: it writes the exported model,
substitutes {lp}/{sol}/{timelimit} into the configured command, and reads
variable activities back from the solution file (CBC-style or plain
"name value" lines). Set MBT_SOLVER_CMD to select it from the CLI.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .milp import TOLERANCE, MilpModel, export_lp

SOLVER_ENV_VAR = "MBT_SOLVER_CMD"


class SolverError(RuntimeError):
    pass


@dataclass
class SolveResult:
    status: str  # optimal | infeasible | unbounded | timeout | error
    objective: float | None
    activities: dict[str, float] = field(default_factory=dict)
    elapsed: float = 0.0
    message: str = ""


def _empty_model_result(model: MilpModel, elapsed: float) -> SolveResult:
    for row in model.rows:
        ok = {"<=": 0.0 <= row.rhs, ">=": 0.0 >= row.rhs, "=": row.rhs == 0.0}[row.sense]
        if not ok:
            return SolveResult("infeasible", None, {}, elapsed)
    return SolveResult("optimal", 0.0, {}, elapsed)


class ScipySolver:
    """In-process LP/MIP solves through scipy's HiGHS interface."""

    capabilities = frozenset({"lp_solve", "mip_solve"})

    def __init__(self, time_limit: float | None = None,
                 tolerance: float = TOLERANCE):
        self.time_limit = time_limit
        self.tolerance = tolerance

    def solve(self, model: MilpModel, time_limit: float | None = None) -> SolveResult:
        start = time.perf_counter()
        names = [name for name, _ in model.variables]
        if not names:
            return _empty_model_result(model, time.perf_counter() - start)
        index = {name: i for i, name in enumerate(names)}
        n = len(names)
        sign = 1.0 if model.sense == "min" else -1.0
        c = np.zeros(n)
        for name, coeff in model.objective:
            c[index[name]] += sign * coeff
        lb = np.array([spec.lb for _, spec in model.variables])
        ub = np.array([spec.ub for _, spec in model.variables])
        integrality = np.array([1 if spec.integer else 0
                                for _, spec in model.variables])
        constraints = []
        if model.rows:
            data, row_idx, col_idx = [], [], []
            b_lo = np.empty(len(model.rows))
            b_hi = np.empty(len(model.rows))
            for i, row in enumerate(model.rows):
                for name, coeff in row.coeffs:
                    data.append(coeff)
                    row_idx.append(i)
                    col_idx.append(index[name])
                if row.sense == "<=":
                    b_lo[i], b_hi[i] = -np.inf, row.rhs
                elif row.sense == ">=":
                    b_lo[i], b_hi[i] = row.rhs, np.inf
                else:
                    b_lo[i] = b_hi[i] = row.rhs
            matrix = sparse.csr_matrix((data, (row_idx, col_idx)),
                                       shape=(len(model.rows), n))
            constraints = [LinearConstraint(matrix, b_lo, b_hi)]
        limit = time_limit if time_limit is not None else self.time_limit
        options = {"mip_rel_gap": 0.0}
        if limit is not None:
            options["time_limit"] = max(float(limit), 0.0)
        res = milp(c, constraints=constraints, integrality=integrality,
                   bounds=Bounds(lb, ub), options=options)
        elapsed = time.perf_counter() - start
        status = {0: "optimal", 1: "timeout", 2: "infeasible",
                  3: "unbounded"}.get(res.status, "error")
        activities: dict[str, float] = {}
        objective = None
        if res.x is not None:
            activities = {name: float(res.x[i]) for i, name in enumerate(names)}
            objective = float(sign * res.fun)
        return SolveResult(status, objective, activities, elapsed,
                           message=res.message or "")


class SubprocessSolver:
    """Adapter around an external solver invoked per solve.

    command is a template such as "cbc {lp} solve solution {sol}"; {timelimit}
    is substituted with the whole-second budget when present.
    """

    capabilities = frozenset({"lp_solve", "mip_solve"})

    def __init__(self, command: str, time_limit: float | None = None,
                 tolerance: float = TOLERANCE):
        if not command:
            raise ValueError("empty solver command")
        self.command = command
        self.time_limit = time_limit
        self.tolerance = tolerance

    def solve(self, model: MilpModel, time_limit: float | None = None) -> SolveResult:
        start = time.perf_counter()
        if not model.variables:
            return _empty_model_result(model, time.perf_counter() - start)
        limit = time_limit if time_limit is not None else self.time_limit
        with tempfile.TemporaryDirectory(prefix="mbt_solve_") as tmp:
            lp_path = os.path.join(tmp, "model.lp")
            sol_path = os.path.join(tmp, "model.sol")
            with open(lp_path, "w", encoding="utf-8") as fh:
                fh.write(export_lp(model))
            cmd = self.command.format(
                lp=lp_path, sol=sol_path,
                timelimit=int(limit) if limit is not None else 0)
            try:
                proc = subprocess.run(
                    shlex.split(cmd), capture_output=True, text=True,
                    timeout=limit + 30 if limit else None)
            except subprocess.TimeoutExpired:
                return SolveResult("timeout", None, {},
                                   time.perf_counter() - start,
                                   message="subprocess killed past its budget")
            if proc.returncode != 0:
                raise SolverError(
                    f"solver command failed ({proc.returncode}): {proc.stderr[-500:]}")
            if not os.path.exists(sol_path):
                raise SolverError("solver produced no solution file")
            with open(sol_path, "r", encoding="utf-8") as fh:
                sol_text = fh.read()
        status, activities = _parse_solution(sol_text, model)
        elapsed = time.perf_counter() - start
        if status in ("infeasible", "unbounded", "error"):
            return SolveResult(status, None, {}, elapsed)
        objective = sum(coeff * activities.get(name, 0.0)
                        for name, coeff in model.objective)
        return SolveResult(status, objective, activities, elapsed)


def _parse_solution(text: str, model: MilpModel) -> tuple[str, dict[str, float]]:
    known = {name for name, _ in model.variables}
    lines = text.splitlines()
    status = None
    header = lines[0].lower() if lines else ""
    if "infeasible" in header:
        status = "infeasible"
    elif "unbounded" in header:
        status = "unbounded"
    elif "optimal" in header:
        status = "optimal"
    elif "stopped" in header or "limit" in header or "interrupt" in header:
        status = "timeout"
    activities: dict[str, float] = {}
    for line in lines:
        parts = line.split()
        for i, token in enumerate(parts):
            if token in known and i + 1 < len(parts):
                try:
                    activities[token] = float(parts[i + 1])
                except ValueError:
                    pass
                break
    if status is None:
        status = "optimal" if activities else "error"
    # unmentioned variables are zero by solver convention
    return status, activities


def solver_from_env(time_limit: float | None = None):
    """SubprocessSolver when MBT_SOLVER_CMD is set, ScipySolver otherwise."""
    command = os.environ.get(SOLVER_ENV_VAR, "").strip()
    if command:
        return SubprocessSolver(command, time_limit=time_limit)
    return ScipySolver(time_limit=time_limit)
