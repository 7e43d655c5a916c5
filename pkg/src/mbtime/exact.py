"""Exact broadcast time: iterative decision solves, plus a brute-force oracle.

The exact engine raises the horizon t from the best available lower bound and
solves the decision MIP at each level; the first level whose optimum covers
all non-sources is the broadcast time, and the activities induce a witness
schedule. A known upper bound ub lets the loop stop at ub-1: refuting that
level proves tau = ub.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

from .bounds import best_combinatorial_lower
from .graph import Instance
from .milp import (TOLERANCE, BoundSearchTimeout, build_decision_model,
                   lp_tstar)
from .schedule import (EMPTY_SCHEDULE, BroadcastSchedule, schedule_length,
                       validate_schedule)


class ExtractionError(ValueError):
    pass


@dataclass
class SolveOutcome:
    status: str  # Optimal | LowerBoundOnly | Error
    tau: int
    schedule: BroadcastSchedule | None
    elapsed: float
    iterations: list[tuple[int, int]] = field(default_factory=list)
    message: str = ""


def extract_schedule(inst: Instance, activities: Mapping[str, float],
                     t: int, tolerance: float = TOLERANCE) -> BroadcastSchedule:
    """Read the rounds off integral x activities; trailing idle rounds dropped."""
    rounds: list[set[tuple[int, int]]] = [set() for _ in range(t)]
    for name, value in activities.items():
        if not name.startswith("x_"):
            continue
        if tolerance < value < 1.0 - tolerance:
            raise ExtractionError(f"non-integral activity {name}={value}")
        if value >= 1.0 - tolerance:
            _, u, v, k = name.split("_")
            rounds[int(k) - 1].add((int(u), int(v)))
    while rounds and not rounds[-1]:
        rounds.pop()
    sched = BroadcastSchedule.from_rounds(rounds)
    violations = validate_schedule(inst, sched)
    if violations:
        raise ExtractionError(
            "activities do not form a feasible schedule: "
            + "; ".join(str(v) for v in violations))
    return sched


def solve_exact(inst: Instance, solver, time_limit: float | None = None, *,
                start_from: str = "deg",
                upper_bound: int | None = None,
                upper_schedule: BroadcastSchedule | None = None) -> SolveOutcome:
    """Iteratively deepen the decision model until it covers all non-sources.

    start_from="lp" additionally runs the LP horizon search to lift the
    starting level. When upper_bound (with its witness schedule) is supplied,
    refuting level ub-1 concludes tau = ub without solving at ub.
    """
    if "mip_solve" not in getattr(solver, "capabilities", frozenset()):
        raise ValueError("solver lacks mip_solve capability")
    if (upper_bound is None) != (upper_schedule is None):
        raise ValueError("upper_bound and upper_schedule go together")
    started = time.perf_counter()
    target = inst.n - inst.sigma
    if target == 0:
        return SolveOutcome("Optimal", 0, EMPTY_SCHEDULE,
                            time.perf_counter() - started)
    deadline = started + time_limit if time_limit is not None else None
    t, _ = best_combinatorial_lower(inst)
    iterations: list[tuple[int, int]] = []
    if start_from == "lp":
        try:
            t = lp_tstar(inst, solver, t_start=t)
        except BoundSearchTimeout as exc:
            return SolveOutcome("LowerBoundOnly", exc.certified_lower, None,
                                time.perf_counter() - started, iterations,
                                message="LP horizon search timed out")
    elif start_from != "deg":
        raise ValueError(f"start_from must be 'deg' or 'lp', got {start_from!r}")
    t = max(t, 1)
    while upper_bound is None or t < upper_bound:
        remaining = None
        if deadline is not None:
            remaining = deadline - time.perf_counter()
            if remaining <= 0:
                return SolveOutcome("LowerBoundOnly", t, None,
                                    time.perf_counter() - started, iterations,
                                    message="budget exhausted")
        result = solver.solve(build_decision_model(inst, t),
                              time_limit=remaining)
        if result.status == "timeout":
            return SolveOutcome("LowerBoundOnly", t, None,
                                time.perf_counter() - started, iterations,
                                message=f"decision solve at t={t} interrupted")
        if result.status != "optimal":
            return SolveOutcome("Error", t, None,
                                time.perf_counter() - started, iterations,
                                message=f"solver returned {result.status} at t={t}: "
                                        f"{result.message}")
        optimum = int(round(result.objective))
        iterations.append((t, optimum))
        if optimum == target:
            sched = extract_schedule(inst, result.activities, t,
                                     getattr(solver, "tolerance", TOLERANCE))
            return SolveOutcome("Optimal", t, sched,
                                time.perf_counter() - started, iterations)
        t += 1
    # every level below the known upper bound is refuted
    return SolveOutcome("Optimal", upper_bound, upper_schedule,
                        time.perf_counter() - started, iterations)


# --- brute-force oracle -------------------------------------------------------

def _successor_matchings(informed: frozenset[int], inst: Instance
                         ) -> dict[frozenset[int], tuple[tuple[int, int], ...]]:
    """All maximal one-round matchings from informed to uninformed nodes,
    keyed by the resulting informed set.

    Senders are forced to pick when they can (a superset of informed nodes is
    never worse, so maximal receiver sets dominate), which keeps the
    enumeration small without losing optimal states.
    """
    g = inst.graph
    senders = [u for u in sorted(informed)
               if any(v not in informed for v in g.neighbors(u))]
    results: dict[frozenset[int], tuple[tuple[int, int], ...]] = {}

    def walk(idx: int, taken: set[int], pairs: list[tuple[int, int]]) -> None:
        if idx == len(senders):
            state = informed | taken
            if state not in results:
                results[state] = tuple(pairs)
            return
        u = senders[idx]
        choices = [v for v in g.neighbors(u)
                   if v not in informed and v not in taken]
        if not choices:
            walk(idx + 1, taken, pairs)
            return
        for v in choices:
            taken.add(v)
            pairs.append((u, v))
            walk(idx + 1, taken, pairs)
            pairs.pop()
            taken.remove(v)

    walk(0, set(), [])
    results.pop(informed, None)
    return results


def brute_force_tau(inst: Instance, cap: int = 10) -> tuple[int, BroadcastSchedule]:
    """Exact broadcast time by BFS over informed-node sets.

    Refuses instances above the node cap; the state space is exponential.
    """
    if inst.n > cap:
        raise ValueError(f"instance has {inst.n} nodes, oracle cap is {cap}")
    everyone = frozenset(inst.graph.nodes())
    start = frozenset(inst.sources)
    if start == everyone:
        return 0, EMPTY_SCHEDULE
    parents: dict[frozenset[int], tuple[frozenset[int], tuple[tuple[int, int], ...]]] = {}
    frontier = [start]
    seen = {start}
    depth = 0
    while frontier:
        depth += 1
        next_frontier: list[frozenset[int]] = []
        for state in frontier:
            for new_state, pairs in _successor_matchings(state, inst).items():
                if new_state in seen:
                    continue
                seen.add(new_state)
                parents[new_state] = (state, pairs)
                if new_state == everyone:
                    rounds: list[tuple[tuple[int, int], ...]] = []
                    node = new_state
                    while node != start:
                        node, step = parents[node]
                        rounds.append(step)
                    rounds.reverse()
                    return depth, BroadcastSchedule.from_rounds(rounds)
                next_frontier.append(new_state)
        frontier = next_frontier
    raise RuntimeError("search exhausted without covering all nodes; "
                       "is the instance connected?")
