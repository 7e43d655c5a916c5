"""Analytical and combinatorial lower bounds, plus the trivial upper bound.

Three lower bounds on the broadcast time: the doubling (log) bound, the
m-step Fibonacci bound driven by the maximum degree, and the degree-sequence
simulation bound, which dominates the other two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .graph import Instance, ordered_degree_sequence


@dataclass(frozen=True)
class FibSequence:
    """m-step Fibonacci numbers f_1..f_t (each term sums the previous m)."""

    m: int
    values: tuple[int, ...]


@dataclass
class BoundEntry:
    value: int | float | None
    elapsed: float = 0.0
    status: str = "exact"  # exact | timeout | error


@dataclass
class BoundReport:
    """Named bound values with timing for one instance."""

    entries: dict[str, BoundEntry] = field(default_factory=dict)

    def value(self, name: str) -> int | float | None:
        entry = self.entries.get(name)
        return entry.value if entry else None


def trivial_bounds(n: int, sigma: int) -> tuple[int, int]:
    """(ceil(log2(n/sigma)), n - sigma), the doubling bounds."""
    if not 1 <= sigma <= n:
        raise ValueError(f"need 1 <= sigma <= n, got sigma={sigma}, n={n}")
    t = 0
    cap = sigma
    while cap < n:
        cap <<= 1
        t += 1
    return t, n - sigma


def fib_sequence(m: int, t: int) -> FibSequence:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    values: list[int] = []
    for k in range(1, t + 1):
        if k == 1:
            values.append(1)
        else:
            values.append(sum(values[max(0, k - 1 - m):k - 1]))
    return FibSequence(m, tuple(values))


def fibonacci_bound(n: int, sigma: int, d: int) -> int:
    """Smallest t with 2*sigma*(f_1 + ... + f_t) >= n for the (d-1)-step numbers.

    d is the maximum degree; d-1 is clamped to 1 so that d=1 (K_1, K_2) stays
    defined, where the clamped bound is exact anyway.
    """
    if not 1 <= sigma <= n:
        raise ValueError(f"need 1 <= sigma <= n, got sigma={sigma}, n={n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if n == sigma:
        return 0
    m = max(d - 1, 1)
    values: list[int] = []
    total = 0
    t = 0
    while True:
        t += 1
        f_t = 1 if t == 1 else sum(values[max(0, t - 1 - m):t - 1])
        values.append(f_t)
        total += f_t
        if 2 * sigma * total >= n:
            return t


def degree_bound(sigma: int, degrees: Sequence[int]) -> int | float:
    """Degree-sequence lower bound: simulate the relaxed process where node i
    may inform d_i (sources) or d_i - 1 (non-sources) others, one per round,
    in the given order.

    Expects source degrees first, then non-source degrees non-increasing.
    Returns math.inf when the sequence stalls before covering n, which cannot
    happen for connected graphs and signals inconsistent input.
    """
    n = len(degrees)
    if not 1 <= sigma <= n:
        raise ValueError(f"need 1 <= sigma <= n, got sigma={sigma}, n={n}")
    if n == sigma:
        return 0
    counters = [0] * n
    nu = sigma
    t = 0
    while nu < n:
        t += 1
        active = [i for i in range(nu)
                  if counters[i] < degrees[i] - (1 if i >= sigma else 0)]
        if not active:
            return math.inf
        for i in active:
            counters[i] += 1
        nu += len(active)
    return t


def best_combinatorial_lower(inst: Instance) -> tuple[int, str]:
    """Strongest of the log/fib/deg bounds; ties go to the last in that order."""
    n, sigma = inst.n, inst.sigma
    log_lb, _ = trivial_bounds(n, sigma)
    fib_lb = fibonacci_bound(n, sigma, max(inst.graph.max_degree, 1))
    deg_lb = degree_bound(sigma, ordered_degree_sequence(inst))
    best_value, best_name = log_lb, "log"
    for value, name in ((fib_lb, "fib"), (deg_lb, "deg")):
        if value >= best_value:
            best_value, best_name = value, name
    return int(best_value), best_name
