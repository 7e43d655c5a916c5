"""Integer programming models for broadcast time and their LP-text export.

Three builders share the x[u][v][k] arc variables (directed copies of each
edge, one per round):

* optimization model: minimize the number of active rounds (z variables);
* decision model: maximize how many non-sources get informed within t rounds;
* makespan model: minimize a single integer y bounding every receive round.

The printed decision model omits a per-round sending capacity; without it a
node could whisper to several neighbors in one round, so `cap` rows are added
by default (`include_capacity=False` gives the literal variant for study).

Export is byte-stable: equal models produce identical LP text.
"""

from __future__ import annotations

import dataclasses
import re
import time
from dataclasses import dataclass
from typing import Mapping

from .graph import Instance

TOLERANCE = 1e-6


@dataclass(frozen=True)
class VarSpec:
    lb: float
    ub: float
    integer: bool


@dataclass(frozen=True)
class Row:
    name: str
    tag: str
    coeffs: tuple[tuple[str, float], ...]
    sense: str  # "<=", ">=", "="
    rhs: float


@dataclass(frozen=True)
class MilpModel:
    kind: str  # optimization | decision | makespan
    horizon: int
    sense: str  # min | max
    objective: tuple[tuple[str, float], ...]
    rows: tuple[Row, ...]
    variables: tuple[tuple[str, VarSpec], ...]
    arc_vars: dict[str, tuple[int, int, int]]  # x name -> (u, v, k)
    relaxed: bool = False

    def relaxation(self) -> MilpModel:
        """Continuous relaxation: same bounds, integrality dropped."""
        relaxed_vars = tuple(
            (name, dataclasses.replace(spec, integer=False))
            for name, spec in self.variables
        )
        return dataclasses.replace(self, variables=relaxed_vars, relaxed=True)

    @property
    def variable_count(self) -> int:
        return len(self.variables)

    @property
    def row_count(self) -> int:
        return len(self.rows)


def x_name(u: int, v: int, k: int) -> str:
    return f"x_{u}_{v}_{k}"


def z_name(k: int) -> str:
    return f"z_{k}"


def _arc_variables(inst: Instance, t: int) -> tuple[list[tuple[str, VarSpec]],
                                                    dict[str, tuple[int, int, int]]]:
    """x variables in fixed order: (u, v) arcs ascending, k ascending.

    Non-sources cannot send in round 1 and sources never receive; those
    variables stay in the model fixed to zero so exported names are stable.
    """
    g, src = inst.graph, inst.source_set
    variables = []
    arcs = {}
    for u in g.nodes():
        for v in g.neighbors(u):
            for k in range(1, t + 1):
                name = x_name(u, v, k)
                fixed = (k == 1 and u not in src) or (v in src)
                spec = VarSpec(0.0, 0.0 if fixed else 1.0, True)
                variables.append((name, spec))
                arcs[name] = (u, v, k)
    return variables, arcs


def _check_horizon(t: int) -> None:
    if t < 1:
        raise ValueError(f"horizon t must be >= 1, got {t}")


def _informed_before_rows(inst: Instance, t: int) -> list[Row]:
    """(1c): a non-source sends in round k only if it received earlier."""
    rows = []
    for u in inst.graph.nodes():
        if u in inst.source_set:
            continue
        nbrs = inst.graph.neighbors(u)
        if not nbrs:
            continue
        for k in range(2, t + 1):
            coeffs = [(x_name(u, v, k), 1.0) for v in nbrs]
            coeffs += [(x_name(w, u, ell), -1.0)
                       for w in nbrs for ell in range(1, k)]
            rows.append(Row(f"1c_{u}_{k}", "1c", tuple(coeffs), "<=", 0.0))
    return rows


def _capacity_rows(inst: Instance, t: int) -> list[Row]:
    """cap: each node sends to at most one neighbor per round."""
    rows = []
    for u in inst.graph.nodes():
        nbrs = inst.graph.neighbors(u)
        if not nbrs:
            continue  # vacuous for isolated nodes (heuristic subproblems)
        for k in range(1, t + 1):
            coeffs = tuple((x_name(u, v, k), 1.0) for v in nbrs)
            rows.append(Row(f"cap_{u}_{k}", "cap", coeffs, "<=", 1.0))
    return rows


def _receive_once_rows(inst: Instance, t: int, sense: str, tag: str) -> list[Row]:
    """(1b)/(2b): each non-source receives exactly/at most once overall."""
    rows = []
    for u in inst.graph.nodes():
        if u in inst.source_set:
            continue
        nbrs = inst.graph.neighbors(u)
        if not nbrs:
            if sense == "=":
                raise ValueError(f"node {u} is unreachable (no neighbors); "
                                 "full-coverage model is infeasible")
            continue
        coeffs = tuple((x_name(v, u, k), 1.0)
                       for v in nbrs
                       for k in range(1, t + 1))
        rows.append(Row(f"{tag}_{u}", tag, coeffs, sense, 1.0))
    return rows


def receive_round_rows(inst: Instance, t: int, y: str = "y") -> list[Row]:
    """R2: y dominates every node's (round index of its single receive)."""
    rows = []
    for v in inst.graph.nodes():
        if v in inst.source_set:
            continue
        coeffs = [(x_name(u, v, k), float(k))
                  for u in inst.graph.neighbors(v)
                  for k in range(1, t + 1)]
        coeffs.append((y, -1.0))
        rows.append(Row(f"R2_{v}", "R2", tuple(coeffs), "<=", 0.0))
    return rows


def build_optimization_model(inst: Instance, t: int) -> MilpModel:
    """Minimize the number of active rounds subject to full coverage."""
    _check_horizon(t)
    g = inst.graph
    variables, arcs = _arc_variables(inst, t)
    variables += [(z_name(k), VarSpec(0.0, 1.0, True)) for k in range(1, t + 1)]
    rows = _receive_once_rows(inst, t, "=", "1b")
    rows += _informed_before_rows(inst, t)
    for u in g.nodes():
        for k in range(1, t + 1):
            coeffs = tuple([(x_name(u, v, k), 1.0) for v in g.neighbors(u)]
                           + [(z_name(k), -1.0)])
            rows.append(Row(f"1d_{u}_{k}", "1d", coeffs, "<=", 0.0))
    for k in range(2, t + 1):
        rows.append(Row(f"1e_{k}", "1e",
                        ((z_name(k), 1.0), (z_name(k - 1), -1.0)), "<=", 0.0))
    objective = tuple((z_name(k), 1.0) for k in range(1, t + 1))
    return MilpModel("optimization", t, "min", objective, tuple(rows),
                     tuple(variables), arcs)


def build_decision_model(inst: Instance, t: int,
                         include_capacity: bool = True) -> MilpModel:
    """Maximize the number of non-sources informed within t rounds."""
    _check_horizon(t)
    g, src = inst.graph, inst.source_set
    variables, arcs = _arc_variables(inst, t)
    rows = _receive_once_rows(inst, t, "<=", "2b")
    rows += _informed_before_rows(inst, t)
    if include_capacity:
        rows += _capacity_rows(inst, t)
    objective = tuple((x_name(u, v, k), 1.0)
                      for v in g.nodes() if v not in src
                      for u in g.neighbors(v)
                      for k in range(1, t + 1))
    return MilpModel("decision", t, "max", objective, tuple(rows),
                     tuple(variables), arcs)


def build_makespan_model(inst: Instance, t: int) -> MilpModel:
    """Minimize one integer y bounding all receive rounds."""
    _check_horizon(t)
    variables, arcs = _arc_variables(inst, t)
    variables.append(("y", VarSpec(0.0, float(t), True)))
    rows = receive_round_rows(inst, t)
    rows += _receive_once_rows(inst, t, "=", "1b")
    rows += _informed_before_rows(inst, t)
    rows += _capacity_rows(inst, t)
    objective = (("y", 1.0),)
    return MilpModel("makespan", t, "min", objective, tuple(rows),
                     tuple(variables), arcs)


# --- LP text export / import -------------------------------------------------

def _format_coeff(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return f"{value:.12g}"


def _format_terms(coeffs: tuple[tuple[str, float], ...]) -> str:
    parts = []
    for name, coeff in coeffs:
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        term = name if mag == 1 else f"{_format_coeff(mag)} {name}"
        if not parts:
            parts.append(term if sign == "+" else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    if not parts:
        raise ValueError("empty linear expression")
    return " ".join(parts)


def export_lp(model: MilpModel) -> str:
    """CPLEX-LP-style text; byte-stable for equal models."""
    out = ["Minimize" if model.sense == "min" else "Maximize"]
    out.append(f" obj: {_format_terms(model.objective)}")
    out.append("Subject To")
    for row in model.rows:
        out.append(f" {row.name}: {_format_terms(row.coeffs)} {row.sense} {_format_coeff(row.rhs)}")
    out.append("Bounds")
    for name, spec in model.variables:
        if spec.lb == spec.ub:
            out.append(f" {name} = {_format_coeff(spec.lb)}")
        else:
            out.append(f" {_format_coeff(spec.lb)} <= {name} <= {_format_coeff(spec.ub)}")
    binaries = [name for name, spec in model.variables
                if spec.integer and spec.lb == 0.0 and spec.ub <= 1.0]
    binary_set = set(binaries)
    generals = [name for name, spec in model.variables
                if spec.integer and name not in binary_set]
    if binaries:
        out.append("Binaries")
        out.extend(f" {name}" for name in binaries)
    if generals:
        out.append("Generals")
        out.extend(f" {name}" for name in generals)
    out.append("End")
    return "\n".join(out) + "\n"


@dataclass
class ParsedLp:
    sense: str
    objective: dict[str, float]
    rows: dict[str, tuple[dict[str, float], str, float]]
    bounds: dict[str, tuple[float, float]]
    binaries: set[str]
    generals: set[str]

    @property
    def variable_names(self) -> set[str]:
        names = set(self.bounds)
        names.update(self.objective)
        for coeffs, _, _ in self.rows.values():
            names.update(coeffs)
        return names


_TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z0-9_]+)")


def _parse_expression(text: str) -> dict[str, float]:
    coeffs: dict[str, float] = {}
    pos = 0
    while pos < len(text):
        match = _TERM_RE.match(text, pos)
        if not match:
            if text[pos].isspace():
                pos += 1
                continue
            raise ValueError(f"cannot parse expression near {text[pos:pos + 20]!r}")
        sign, number, name = match.groups()
        value = float(number) if number else 1.0
        if sign == "-":
            value = -value
        coeffs[name] = coeffs.get(name, 0.0) + value
        pos = match.end()
    return coeffs


def parse_lp(text: str) -> ParsedLp:
    """Read back LP text in the subset emitted by export_lp."""
    sense = "min"
    objective: dict[str, float] = {}
    rows: dict[str, tuple[dict[str, float], str, float]] = {}
    lp_bounds: dict[str, tuple[float, float]] = {}
    binaries: set[str] = set()
    generals: set[str] = set()
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        lowered = line.lower()
        if lowered in ("minimize", "maximize"):
            sense = "min" if lowered == "minimize" else "max"
            section = "objective"
            continue
        if lowered in ("subject to", "st", "s.t."):
            section = "rows"
            continue
        if lowered == "bounds":
            section = "bounds"
            continue
        if lowered in ("binaries", "binary"):
            section = "binaries"
            continue
        if lowered in ("generals", "general"):
            section = "generals"
            continue
        if lowered == "end":
            break
        if section == "objective":
            body = line.split(":", 1)[1] if ":" in line else line
            for name, coeff in _parse_expression(body).items():
                objective[name] = objective.get(name, 0.0) + coeff
        elif section == "rows":
            name, _, body = line.partition(":")
            match = re.search(r"(<=|>=|=)\s*([-+]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*$", body)
            if not match:
                raise ValueError(f"cannot parse constraint {line!r}")
            sense_tok, rhs = match.group(1), float(match.group(2))
            rows[name.strip()] = (_parse_expression(body[:match.start()]), sense_tok, rhs)
        elif section == "bounds":
            eq = re.match(r"^([A-Za-z0-9_]+)\s*=\s*([-+]?\d+(?:\.\d+)?)$", line)
            rng = re.match(
                r"^([-+]?\d+(?:\.\d+)?)\s*<=\s*([A-Za-z0-9_]+)\s*<=\s*([-+]?\d+(?:\.\d+)?)$",
                line)
            if eq:
                value = float(eq.group(2))
                lp_bounds[eq.group(1)] = (value, value)
            elif rng:
                lp_bounds[rng.group(2)] = (float(rng.group(1)), float(rng.group(3)))
            else:
                raise ValueError(f"cannot parse bound {line!r}")
        elif section == "binaries":
            binaries.update(line.split())
        elif section == "generals":
            generals.update(line.split())
    return ParsedLp(sense, objective, rows, lp_bounds, binaries, generals)


# --- LP relaxation bounds ----------------------------------------------------

@dataclass
class RelaxationResult:
    objective_value: float | None
    status: str  # optimal | infeasible | timeout | error
    elapsed: float


class BoundSearchTimeout(RuntimeError):
    """Raised when an iterative bound search runs out of budget.

    certified_lower is still a valid lower bound on the broadcast time.
    """

    def __init__(self, certified_lower: int):
        super().__init__(f"timed out; certified lower bound {certified_lower}")
        self.certified_lower = certified_lower


def lp_zeta(inst: Instance, t: int, solver) -> RelaxationResult:
    """Optimal value of the continuous relaxation of the optimization model."""
    start = time.perf_counter()
    result = solver.solve(build_optimization_model(inst, t).relaxation())
    elapsed = time.perf_counter() - start
    if result.status != "optimal":
        return RelaxationResult(None, result.status, elapsed)
    return RelaxationResult(result.objective, "optimal", elapsed)


def lp_tstar(inst: Instance, solver, t_start: int = 1) -> int:
    """Smallest t >= t_start at which the relaxed decision model can inform
    everyone; a lower bound on the broadcast time.
    """
    target = inst.n - inst.sigma
    if target == 0:
        return 0
    tol = getattr(solver, "tolerance", TOLERANCE)
    t = max(t_start, 1)
    while True:
        result = solver.solve(build_decision_model(inst, t).relaxation())
        if result.status == "timeout":
            raise BoundSearchTimeout(t)
        if result.status != "optimal":
            raise RuntimeError(f"relaxation at t={t} returned {result.status}")
        if result.objective >= target - tol:
            return t
        if t >= target:
            raise RuntimeError(f"relaxed optimum below {target} at t={t}; "
                               "instance is likely disconnected")
        t += 1
