import math

import pytest

from mbtime.bounds import best_combinatorial_lower
from mbtime.exact import (ExtractionError, brute_force_tau, extract_schedule,
                          solve_exact)
from mbtime.graph import Graph, GeneratorConfig, Instance, generate_random
from mbtime.heuristic import LookaheadConfig, construct
from mbtime.schedule import (BroadcastSchedule, schedule_length,
                             validate_schedule)

from conftest import (complete_instance, hypercube_instance, path_instance,
                      star_instance)


def spider_instance():
    """Tree where the degree bound (3) undercuts the optimum (4)."""
    g = Graph.from_edges(5, [(1, 2), (2, 3), (3, 4), (3, 5)])
    return Instance(g, (1,), "spider")


class TestBruteForce:
    def test_k3(self):
        tau, sched = brute_force_tau(complete_instance(3))
        assert tau == 2
        assert validate_schedule(complete_instance(3), sched) == []

    def test_star_center(self):
        tau, sched = brute_force_tau(star_instance(5))
        assert tau == 4 and schedule_length(sched) == 4

    def test_p2(self):
        assert brute_force_tau(path_instance(2))[0] == 1

    def test_all_sources(self):
        inst = complete_instance(3, sources=(1, 2, 3))
        tau, sched = brute_force_tau(inst)
        assert tau == 0 and schedule_length(sched) == 0

    def test_cap_guard(self):
        with pytest.raises(ValueError, match="cap"):
            brute_force_tau(path_instance(11))
        assert brute_force_tau(path_instance(11), cap=11)[0] == 10

    def test_witness_always_validates(self):
        for seed in range(10):
            inst = generate_random(GeneratorConfig(8, 0.3, 2, seed))
            tau, sched = brute_force_tau(inst)
            assert validate_schedule(inst, sched) == []
            assert schedule_length(sched) == tau


class TestExtractSchedule:
    def test_unique_p3_solution(self):
        activities = {"x_1_2_1": 1.0, "x_2_3_2": 1.0, "x_2_1_1": 0.0,
                      "x_3_2_1": 0.0}
        sched = extract_schedule(path_instance(3), activities, 2)
        assert sched.rounds == (frozenset({(1, 2)}), frozenset({(2, 3)}))

    def test_fractional_rejected(self):
        with pytest.raises(ExtractionError, match="non-integral"):
            extract_schedule(path_instance(3), {"x_1_2_1": 0.5}, 2)

    def test_infeasible_activities_rejected(self):
        with pytest.raises(ExtractionError, match="feasible"):
            extract_schedule(path_instance(3), {"x_1_2_1": 1.0}, 2)

    def test_trailing_idle_rounds_trimmed(self):
        activities = {"x_1_2_1": 1.0, "x_2_3_2": 1.0}
        assert schedule_length(extract_schedule(path_instance(3),
                                                activities, 4)) == 2


class TestSolveExact:
    def test_p4_is_worst_case(self, solver):
        out = solve_exact(path_instance(4), solver)
        assert out.status == "Optimal" and out.tau == 3
        assert schedule_length(out.schedule) == 3
        assert validate_schedule(path_instance(4), out.schedule) == []

    def test_hypercube(self, solver):
        out = solve_exact(hypercube_instance(3), solver)
        assert out.tau == 3

    def test_k8_doubles(self, solver):
        assert solve_exact(complete_instance(8), solver).tau == 3

    def test_all_sources_short_circuit(self, solver):
        inst = complete_instance(4, sources=(1, 2, 3, 4))
        out = solve_exact(inst, solver)
        assert out.status == "Optimal" and out.tau == 0
        assert schedule_length(out.schedule) == 0

    def test_zero_budget_certifies_start(self, solver):
        inst = path_instance(6)
        out = solve_exact(inst, solver, time_limit=0)
        assert out.status == "LowerBoundOnly"
        assert out.tau == best_combinatorial_lower(inst)[0]
        assert out.schedule is None

    def test_lp_start(self, solver):
        out = solve_exact(path_instance(5), solver, start_from="lp")
        assert out.tau == 4

    def test_bad_start_flag(self, solver):
        with pytest.raises(ValueError, match="start_from"):
            solve_exact(path_instance(3), solver, start_from="nope")

    def test_upper_bound_concludes_at_refutation(self, solver):
        inst = spider_instance()
        assert best_combinatorial_lower(inst)[0] == 3
        ub_sched = construct(inst, LookaheadConfig(k=1))
        assert schedule_length(ub_sched) == 4
        out = solve_exact(inst, solver, upper_bound=4, upper_schedule=ub_sched)
        assert out.status == "Optimal" and out.tau == 4
        assert out.schedule is ub_sched
        assert out.iterations == [(3, 3)]  # t=3 refuted: only 3 of 4 reachable

    def test_upper_bound_requires_schedule(self, solver):
        with pytest.raises(ValueError, match="go together"):
            solve_exact(path_instance(3), solver, upper_bound=2)

    def test_collapsed_bounds_skip_mip(self, solver):
        inst = path_instance(4)
        ub_sched = construct(inst, LookaheadConfig(k=1))
        out = solve_exact(inst, solver, upper_bound=3, upper_schedule=ub_sched)
        assert out.tau == 3 and out.iterations == []

    def test_iteration_trace_deterministic(self, solver):
        inst = generate_random(GeneratorConfig(9, 0.2, 1, 17))
        a = solve_exact(inst, solver)
        b = solve_exact(inst, solver)
        assert a.iterations == b.iterations
        assert a.tau == b.tau

    def test_requires_mip_capability(self):
        class LpOnly:
            capabilities = frozenset({"lp_solve"})

        with pytest.raises(ValueError, match="mip_solve"):
            solve_exact(path_instance(3), LpOnly())

    def test_oracle_agreement(self, solver):
        for seed in range(12):
            inst = generate_random(GeneratorConfig(7, 0.3, 1 + seed % 2,
                                                   200 + seed))
            tau, _ = brute_force_tau(inst)
            out = solve_exact(inst, solver)
            assert out.tau == tau, inst.name
            assert schedule_length(out.schedule) == tau
            assert validate_schedule(inst, out.schedule) == []

    def test_sandwich(self, solver):
        for seed in range(8):
            inst = generate_random(GeneratorConfig(8, 0.25, 1, 300 + seed))
            lower = best_combinatorial_lower(inst)[0]
            out = solve_exact(inst, solver)
            ub1 = schedule_length(construct(inst, LookaheadConfig(k=1)))
            assert lower <= out.tau <= ub1 <= inst.n - inst.sigma
