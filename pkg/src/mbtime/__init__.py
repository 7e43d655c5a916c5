"""Minimum broadcast time: bounds, heuristics, and exact MIP solvers."""

from .bounds import (BoundEntry, BoundReport, best_combinatorial_lower,
                     degree_bound, fib_sequence, fibonacci_bound,
                     trivial_bounds)
from .exact import SolveOutcome, brute_force_tau, extract_schedule, solve_exact
from .graph import (GeneratorConfig, Graph, Instance, generate_random,
                    load_instance, ordered_degree_sequence, parse_edgelist,
                    parse_stp, validate_instance, write_edgelist)
from .heuristic import (LookaheadConfig, construct, upper_bound_suite,
                        vertex_weights)
from .matching import (BipartiteGraph, Matching, max_cardinality_matching,
                       max_vertex_weight_matching)
from .milp import (MilpModel, RelaxationResult, build_decision_model,
                   build_makespan_model, build_optimization_model, export_lp,
                   lp_tstar, lp_zeta, parse_lp)
from .schedule import (BroadcastSchedule, ScheduleViolation, broadcast_forest,
                       format_schedule, parse_schedule, schedule_length,
                       validate_schedule)
from .solvers import ScipySolver, SubprocessSolver, solver_from_env

__version__ = "0.1.0"
