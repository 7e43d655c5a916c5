import pytest

from mbtime.graph import Graph, Instance
from mbtime.solvers import ScipySolver


def path_instance(n, source=1):
    g = Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])
    return Instance(g, (source,), f"P{n}")


def complete_instance(n, sources=(1,)):
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return Instance(Graph.from_edges(n, edges), tuple(sources), f"K{n}")


def star_instance(n, center_source=True):
    """K_{1,n-1} with node 1 as the center."""
    g = Graph.from_edges(n, [(1, i) for i in range(2, n + 1)])
    return Instance(g, (1,) if center_source else (2,), f"star{n}")


def hypercube_instance(j, source=1):
    n = 1 << j
    edges = [(a + 1, b + 1) for a in range(n) for b in range(a + 1, n)
             if bin(a ^ b).count("1") == 1]
    return Instance(Graph.from_edges(n, edges), (source,), f"C{j}")


@pytest.fixture(scope="session")
def solver():
    return ScipySolver()
