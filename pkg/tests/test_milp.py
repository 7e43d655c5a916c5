import pytest

from mbtime.exact import brute_force_tau
from mbtime.graph import GeneratorConfig, generate_random
from mbtime.milp import (build_decision_model, build_makespan_model,
                         build_optimization_model, export_lp, lp_tstar,
                         lp_zeta, parse_lp)

from conftest import complete_instance, path_instance

BUILDERS = (build_optimization_model, build_decision_model,
            build_makespan_model)


class TestModelShape:
    def test_p2_optimization_variables(self):
        model = build_optimization_model(path_instance(2), 1)
        names = [name for name, _ in model.variables]
        assert names == ["x_1_2_1", "x_2_1_1", "z_1"]
        spec = dict(model.variables)["x_2_1_1"]
        assert spec.lb == spec.ub == 0.0  # non-source cannot send in round 1

    @pytest.mark.parametrize("builder", BUILDERS)
    def test_horizon_must_be_positive(self, builder):
        with pytest.raises(ValueError):
            builder(path_instance(3), 0)

    def test_variable_counts(self):
        inst = generate_random(GeneratorConfig(8, 0.3, 1, 4))
        t = 3
        m_edges = inst.graph.edge_count
        assert build_optimization_model(inst, t).variable_count == 2 * m_edges * t + t
        assert build_decision_model(inst, t).variable_count == 2 * m_edges * t
        assert build_makespan_model(inst, t).variable_count == 2 * m_edges * t + 1

    def test_row_tags(self):
        inst = generate_random(GeneratorConfig(6, 0.4, 2, 9))
        t = 2
        n, sigma = inst.n, inst.sigma
        opt = build_optimization_model(inst, t)
        tags = {}
        for row in opt.rows:
            tags[row.tag] = tags.get(row.tag, 0) + 1
        assert tags == {"1b": n - sigma, "1c": (n - sigma) * (t - 1),
                        "1d": n * t, "1e": t - 1}
        dec = build_decision_model(inst, t)
        dec_tags = {row.tag for row in dec.rows}
        assert dec_tags == {"2b", "1c", "cap"}
        mk = build_makespan_model(inst, t)
        mk_tags = {row.tag for row in mk.rows}
        assert mk_tags == {"R2", "1b", "1c", "cap"}

    def test_literal_decision_model_drops_capacity(self):
        inst = complete_instance(3)
        literal = build_decision_model(inst, 1, include_capacity=False)
        assert not any(row.tag == "cap" for row in literal.rows)


class TestExport:
    def test_naming(self):
        text = export_lp(build_optimization_model(path_instance(2), 1))
        assert "x_1_2_1" in text
        assert "1b_2:" in text
        assert " x_2_1_1 = 0" in text  # fixed variable kept, pinned in Bounds
        assert "Binaries" in text

    def test_relaxed_has_no_integer_sections(self):
        model = build_optimization_model(path_instance(3), 2).relaxation()
        text = export_lp(model)
        assert "Binaries" not in text and "Generals" not in text
        assert " 0 <= x_1_2_1 <= 1" in text

    def test_makespan_declares_general_y(self):
        text = export_lp(build_makespan_model(path_instance(3), 2))
        assert "Generals" in text and "\n y\n" in text
        assert "obj: y" in text

    def test_byte_stable(self):
        inst = generate_random(GeneratorConfig(7, 0.3, 2, 2))
        a = export_lp(build_decision_model(inst, 3))
        b = export_lp(build_decision_model(inst, 3))
        assert a == b

    @pytest.mark.parametrize("builder", BUILDERS)
    @pytest.mark.parametrize("relaxed", [False, True])
    def test_round_trip_counts(self, builder, relaxed):
        inst = generate_random(GeneratorConfig(6, 0.5, 1, 13))
        model = builder(inst, 2)
        if relaxed:
            model = model.relaxation()
        parsed = parse_lp(export_lp(model))
        assert len(parsed.rows) == model.row_count
        assert parsed.variable_names == {name for name, _ in model.variables}
        assert parsed.sense == model.sense
        integral = parsed.binaries | parsed.generals
        expected = {name for name, spec in model.variables if spec.integer}
        assert integral == expected


class TestModelOptima:
    def test_optimization_p3(self, solver):
        res = solver.solve(build_optimization_model(path_instance(3), 2))
        assert res.status == "optimal" and round(res.objective) == 2

    @pytest.mark.parametrize("t,expected", [(1, 1), (2, 2)])
    def test_decision_p3(self, solver, t, expected):
        res = solver.solve(build_decision_model(path_instance(3), t))
        assert round(res.objective) == expected

    def test_decision_k3_capacity_binds(self, solver):
        res = solver.solve(build_decision_model(complete_instance(3), 1))
        assert round(res.objective) == 1

    def test_literal_decision_model_overcounts(self, solver):
        # without the capacity rows the source whispers to both neighbors
        literal = build_decision_model(complete_instance(3), 1,
                                       include_capacity=False)
        assert round(solver.solve(literal).objective) == 2

    @pytest.mark.parametrize("t,expected", [(1, 1)])
    def test_makespan_p2(self, solver, t, expected):
        res = solver.solve(build_makespan_model(path_instance(2), t))
        assert round(res.objective) == expected

    @pytest.mark.parametrize("t", [2, 3])
    def test_makespan_p3_ignores_slack_horizon(self, solver, t):
        res = solver.solve(build_makespan_model(path_instance(3), t))
        assert round(res.objective) == 2

    def test_decision_optimization_consistency(self, solver):
        for seed in range(6):
            inst = generate_random(GeneratorConfig(7, 0.25, 1, 40 + seed))
            tau, _ = brute_force_tau(inst)
            target = inst.n - inst.sigma
            at_tau = solver.solve(build_decision_model(inst, tau))
            assert round(at_tau.objective) == target
            if tau > 1:
                below = solver.solve(build_decision_model(inst, tau - 1))
                assert round(below.objective) < target
            opt = solver.solve(build_optimization_model(inst, max(tau, 1)))
            assert round(opt.objective) == tau


class TestRelaxationBounds:
    def test_zeta_p2(self, solver):
        res = lp_zeta(path_instance(2), 1, solver)
        assert res.status == "optimal"
        assert abs(res.objective_value - 1.0) <= 1e-6

    def test_zeta_all_sources_is_zero(self, solver):
        inst = complete_instance(3, sources=(1, 2, 3))
        res = lp_zeta(inst, 2, solver)
        assert abs(res.objective_value) <= 1e-6

    def test_zeta_non_increasing(self, solver):
        inst = generate_random(GeneratorConfig(7, 0.3, 1, 77))
        horizon = inst.n - inst.sigma
        values = [lp_zeta(inst, t, solver).objective_value
                  for t in range(horizon, horizon + 3)]
        for earlier, later in zip(values, values[1:]):
            assert later <= earlier + 1e-6

    def test_tstar_p3(self, solver):
        assert lp_tstar(path_instance(3), solver) == 2

    def test_tstar_k2(self, solver):
        assert lp_tstar(path_instance(2), solver) == 1

    def test_tstar_all_sources(self, solver):
        inst = complete_instance(3, sources=(1, 2, 3))
        assert lp_tstar(inst, solver) == 0

    def test_dominance_on_oracle_instances(self, solver):
        for seed in range(8):
            inst = generate_random(GeneratorConfig(8, 0.25, 1, 60 + seed))
            tau, _ = brute_force_tau(inst)
            tstar = lp_tstar(inst, solver)
            zeta = lp_zeta(inst, max(tau, 1), solver).objective_value
            assert zeta <= tstar + 1e-6
            assert tstar <= tau
