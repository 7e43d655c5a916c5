import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbtime.bounds import (best_combinatorial_lower, degree_bound,
                           fib_sequence, fibonacci_bound, trivial_bounds)
from mbtime.graph import (GeneratorConfig, generate_random,
                          ordered_degree_sequence)

from conftest import complete_instance, path_instance, star_instance


class TestTrivialBounds:
    @pytest.mark.parametrize("n,sigma,expected", [
        (8, 1, (3, 7)),
        (125, 1, (7, 124)),
        (6, 3, (1, 3)),
        (1, 1, (0, 0)),
    ])
    def test_values(self, n, sigma, expected):
        assert trivial_bounds(n, sigma) == expected

    def test_precondition(self):
        with pytest.raises(ValueError):
            trivial_bounds(3, 0)
        with pytest.raises(ValueError):
            trivial_bounds(3, 4)


class TestFibSequence:
    @pytest.mark.parametrize("m,t,expected", [
        (1, 5, (1, 1, 1, 1, 1)),
        (2, 6, (1, 1, 2, 3, 5, 8)),
        (3, 6, (1, 1, 2, 4, 7, 13)),
        (2, 10, (1, 1, 2, 3, 5, 8, 13, 21, 34, 55)),
    ])
    def test_values(self, m, t, expected):
        assert fib_sequence(m, t).values == expected

    @given(m=st.integers(1, 6), t=st.integers(2, 30))
    @settings(max_examples=50, deadline=None)
    def test_recurrence(self, m, t):
        values = fib_sequence(m, t).values
        padded = (0,) * m + values  # f_k = 0 for k <= 0
        for k in range(1, t):  # index k in values corresponds to f_{k+1}
            assert values[k] == sum(padded[k + m - j] for j in range(1, m + 1))

    def test_preconditions(self):
        with pytest.raises(ValueError):
            fib_sequence(0, 5)
        with pytest.raises(ValueError):
            fib_sequence(2, 0)


class TestFibonacciBound:
    @pytest.mark.parametrize("n,sigma,d,expected", [
        (1, 1, 1, 0),   # nothing to inform
        (10, 1, 2, 5),  # m=1: 2t >= 10
        (8, 1, 4, 3),   # m=3: partial doubled sums 2, 4, 8
    ])
    def test_values(self, n, sigma, d, expected):
        assert fibonacci_bound(n, sigma, d) == expected

    def test_degree_one_clamped(self):
        assert fibonacci_bound(2, 1, 1) == 1

    def test_precondition(self):
        with pytest.raises(ValueError):
            fibonacci_bound(4, 0, 3)
        with pytest.raises(ValueError):
            fibonacci_bound(4, 1, 0)

    @given(n=st.integers(2, 64))
    @settings(max_examples=30, deadline=None)
    def test_large_step_count_matches_log_bound(self, n):
        # with m >= t the recurrence doubles, reproducing the trivial bound
        assert fibonacci_bound(n, 1, n + 1) == trivial_bounds(n, 1)[0]


class TestDegreeBound:
    @pytest.mark.parametrize("sigma,degrees,expected", [
        (1, [3, 3, 3, 3], 2),       # K_4
        (1, [4, 1, 1, 1, 1], 4),    # star, center source
        (1, [1, 2, 2, 1], 3),       # P_4, end source
    ])
    def test_hand_simulations(self, sigma, degrees, expected):
        assert degree_bound(sigma, degrees) == expected

    def test_all_sources(self):
        assert degree_bound(3, [2, 2, 2]) == 0

    def test_stall_returns_infinity(self):
        # [1, 1, 1] cannot come from a connected graph on 3 nodes
        assert degree_bound(1, [1, 1, 1]) == math.inf

    def test_invariant_under_source_degree_order(self):
        assert degree_bound(2, [3, 1, 2, 2]) == degree_bound(2, [1, 3, 2, 2])

    def test_precondition(self):
        with pytest.raises(ValueError):
            degree_bound(0, [1, 1])


class TestBestCombinatorial:
    def test_k4_ties_go_to_deg(self):
        assert best_combinatorial_lower(complete_instance(4)) == (2, "deg")

    def test_star_deg_wins(self):
        assert best_combinatorial_lower(star_instance(5)) == (4, "deg")

    def test_p2_value(self):
        # all three bounds equal 1; the fixed order makes deg the winner
        value, name = best_combinatorial_lower(path_instance(2))
        assert value == 1 and name == "deg"


class TestHierarchy:
    def test_log_le_fib_le_deg_on_random_instances(self):
        for i in range(60):
            n = 4 + (5 * i) % 45
            sigma = 1 + i % 2
            inst = generate_random(GeneratorConfig(n, 0.15, sigma, 500 + i))
            log_lb, upper = trivial_bounds(n, sigma)
            fib = fibonacci_bound(n, sigma, max(inst.graph.max_degree, 1))
            deg = degree_bound(sigma, ordered_degree_sequence(inst))
            assert log_lb <= fib <= deg <= upper
