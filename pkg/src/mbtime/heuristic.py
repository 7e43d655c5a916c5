"""Round-by-round schedule construction with k-step lookahead.

Each iteration solves the decision model on the residual problem (informed
nodes as sources, edges among them dropped) over a k-round horizon, then
commits only the first round. k=1 degenerates to a bipartite matching on the
frontier and needs no MIP solver; k>=2 solves a MIP per round.

Ties are broken lexicographically: coverage first, then smallest makespan of
the lookahead solution, then lowest-id round-1 arcs. The makespan term is
what makes full lookahead (k = n - sigma) an exact method: any full-cover
optimum is then a minimum-makespan cover, so committing its first round
shrinks the remaining broadcast time by exactly one.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

from .bounds import BoundEntry, BoundReport
from .graph import Graph, Instance
from .matching import (BipartiteGraph, Matching, max_cardinality_matching,
                       max_vertex_weight_matching)
from .milp import (TOLERANCE, VarSpec, build_decision_model,
                   receive_round_rows, x_name)
from .schedule import BroadcastSchedule

MATCHERS = ("cardinality", "vertex_weight")


class ConfigurationError(ValueError):
    pass


@dataclass
class LookaheadConfig:
    k: int = 1
    matcher: str = "cardinality"  # effective only at k=1
    solver: object | None = None  # required for k >= 2
    time_limit: float | None = None

    def validate(self) -> None:
        if self.k < 1:
            raise ConfigurationError(f"lookahead k must be >= 1, got {self.k}")
        if self.matcher not in MATCHERS:
            raise ConfigurationError(f"matcher must be one of {MATCHERS}")
        if self.k >= 2:
            caps = getattr(self.solver, "capabilities", frozenset())
            if "mip_solve" not in caps:
                raise ConfigurationError(
                    "lookahead k >= 2 needs a solver with mip_solve")


def vertex_weights(inst: Instance, informed: set[int]) -> dict[int, int]:
    """1 + number of uninformed neighbors, for every uninformed node."""
    g = inst.graph
    return {v: 1 + sum(1 for u in g.neighbors(v) if u not in informed)
            for v in g.nodes() if v not in informed}


def _frontier(inst: Instance, informed: set[int]) -> BipartiteGraph:
    g = inst.graph
    edges = [(u, v) for u in sorted(informed)
             for v in g.neighbors(u) if v not in informed]
    left = {u for u, _ in edges}
    right = {v for _, v in edges}
    return BipartiteGraph.build(left, right, edges)


def _matching_round(inst: Instance, informed: set[int],
                    matcher: str) -> Matching:
    frontier = _frontier(inst, informed)
    if matcher == "vertex_weight":
        weights = vertex_weights(inst, informed)
        return max_vertex_weight_matching(
            frontier, {r: weights[r] for r in frontier.right})
    return max_cardinality_matching(frontier)


def _residual_instance(inst: Instance, informed: set[int]) -> Instance:
    """The parent graph with edges among informed nodes removed; informed
    nodes become the sources."""
    kept = [e for e in inst.graph.sorted_edges()
            if e[0] not in informed or e[1] not in informed]
    graph = Graph.from_edges(inst.n, kept)
    return Instance(graph, tuple(sorted(informed)))


def _lookahead_model(sub: Instance, k: int):
    """Decision model plus the lexicographic tie-break terms.

    Perturbation magnitudes keep primary >> makespan >> arc-rank: the y term
    is at most 1/4 in total and the arc bonuses sum below 1/(8k).
    """
    base = build_decision_model(sub, k)
    eps_y = 1.0 / (4.0 * k)
    arc_scale = 1.0 / (16.0 * max(sub.graph.edge_count, 1) * k)
    src = sub.source_set
    round1 = sorted((u, v) for (u, v, kk) in base.arc_vars.values()
                    if kk == 1 and u in src and v not in src)
    objective = {name: coeff for name, coeff in base.objective}
    objective["y"] = -eps_y
    span = max(len(round1), 1)
    for rank, (u, v) in enumerate(round1):
        name = x_name(u, v, 1)
        bonus = arc_scale * (span - rank) / span
        objective[name] = objective.get(name, 0.0) + bonus
    variables = base.variables + (("y", VarSpec(0.0, float(k), False)),)
    rows = base.rows + tuple(receive_round_rows(sub, k))
    return dataclasses.replace(base, objective=tuple(objective.items()),
                               variables=variables, rows=rows)


def _round1_pairs(activities: dict[str, float], informed: set[int],
                  tolerance: float) -> list[tuple[int, int]] | None:
    """Committed transmissions, or None when the activities are not integral."""
    pairs = []
    for name, value in activities.items():
        if not name.startswith("x_"):
            continue
        if tolerance < value < 1.0 - tolerance:
            return None
        if value >= 1.0 - tolerance:
            _, u, v, k = name.split("_")
            if int(k) == 1:
                pairs.append((int(u), int(v)))
    return [(u, v) for u, v in sorted(pairs)
            if u in informed and v not in informed]


def _lookahead_round(inst: Instance, informed: set[int], k: int, solver,
                     budget: float | None) -> list[tuple[int, int]] | None:
    sub = _residual_instance(inst, informed)
    model = _lookahead_model(sub, k)
    result = solver.solve(model, time_limit=budget)
    tol = getattr(solver, "tolerance", TOLERANCE)
    if result.status == "optimal":
        return _round1_pairs(result.activities, informed, tol)
    if result.status == "timeout" and result.activities:
        # commit the incumbent's first round when it is integral
        return _round1_pairs(result.activities, informed, tol)
    return None


def construct(inst: Instance, cfg: LookaheadConfig) -> BroadcastSchedule:
    """Build a feasible schedule; length is at most n - sigma."""
    cfg.validate()
    everyone = set(inst.graph.nodes())
    informed = set(inst.sources)
    deadline = (time.perf_counter() + cfg.time_limit
                if cfg.time_limit is not None else None)
    rounds: list[list[tuple[int, int]]] = []
    while informed != everyone:
        k_eff = min(cfg.k, max(len(everyone) - len(informed), 1))
        pairs: list[tuple[int, int]] | None = None
        if k_eff >= 2:
            budget = None
            if deadline is not None:
                remaining = deadline - time.perf_counter()
                if remaining <= 0:
                    k_eff = 1  # budget gone: finish with plain matchings
                else:
                    budget = remaining / (len(everyone) - len(informed))
            if k_eff >= 2:
                pairs = _lookahead_round(inst, informed, k_eff, cfg.solver,
                                         budget)
        if not pairs:
            matching = _matching_round(inst, informed, cfg.matcher)
            pairs = list(matching.pairs)
        if not pairs:
            raise RuntimeError("no frontier transmissions available; "
                               "is the instance connected?")
        rounds.append(pairs)
        informed.update(v for _, v in pairs)
    return BroadcastSchedule.from_rounds(rounds)


def upper_bound_suite(inst: Instance, ks, solver=None,
                      time_limit: float | None = None
                      ) -> tuple[BoundReport, dict[int, BroadcastSchedule]]:
    """Run construct for each lookahead; failures are reported per k."""
    report = BoundReport()
    schedules: dict[int, BroadcastSchedule] = {}
    for k in ks:
        start = time.perf_counter()
        try:
            sched = construct(inst, LookaheadConfig(
                k=k, solver=solver, time_limit=time_limit))
        except (ConfigurationError, RuntimeError) as exc:
            report.entries[f"ub_{k}"] = BoundEntry(
                None, time.perf_counter() - start, f"error: {exc}")
            continue
        schedules[k] = sched
        report.entries[f"ub_{k}"] = BoundEntry(
            len(sched), time.perf_counter() - start, "exact")
    return report, schedules
