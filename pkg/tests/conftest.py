import itertools
import random

import pytest

from ngpart.graph import DynGraph


def random_graph(n, p, rng, max_w=1, max_c=1):
    edges = [(u, v, rng.randint(1, max_w))
             for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return DynGraph.from_edges([rng.randint(1, max_c) for _ in range(n)], edges)


def path(n):
    return DynGraph.from_edges([1] * n, [(i, i + 1, 1) for i in range(n - 1)])


def cycle(n):
    return DynGraph.from_edges([1] * n, [(i, (i + 1) % n, 1) for i in range(n)])


def clique_pair(size):
    edges = []
    for off in (0, size):
        edges += [(off + u, off + v, 1) for u, v in itertools.combinations(range(size), 2)]
    return DynGraph.from_edges([1] * (2 * size), edges)


def brute_force_bisection(g, l_max):
    """Exhaustive optimum over feasible 2-way assignments of a compact graph."""
    n = g.num_slots
    edges = list(g.edges())
    best = None
    for mask in range(1 << (n - 1)):  # node n-1 pinned to block 0
        w1 = sum(g.node_weight[v] for v in range(n) if mask >> v & 1)
        if w1 > l_max or g.total_weight - w1 > l_max:
            continue
        cut = sum(w for u, v, w in edges if (mask >> u & 1) != (mask >> v & 1))
        if best is None or cut < best:
            best = cut
    return best


@pytest.fixture
def rng():
    return random.Random(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
