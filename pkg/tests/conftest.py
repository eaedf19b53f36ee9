import itertools

import numpy as np
import pytest

from signedcluster.graph import SignedGraph

ACCEPTANCE_LINES: list[str] = []


def random_signed_graph(n, rng, lo=-1.0, hi=1.0):
    w = np.triu(rng.uniform(lo, hi, (n, n)), 1)
    return SignedGraph(w + w.T)


def brute_force_min_cut(g):
    """Minimum crossing weight over every bipartition, by direct pair summation."""
    best = 0.0
    pairs = [(i, j, g.weights[i, j]) for i in range(g.n) for j in range(i + 1, g.n)]
    for bits in itertools.product((0, 1), repeat=g.n):
        v = sum(w for i, j, w in pairs if bits[i] != bits[j])
        best = min(best, v)
    return best


@pytest.fixture
def triangle():
    # w12=0.5, w13=-0.3, w23=0.8
    return SignedGraph.from_upper(3, [0.5, -0.3, 0.8])


@pytest.fixture
def split_triangle():
    # w12=0.9, w13=-0.5, w23=-0.4
    return SignedGraph.from_upper(3, [0.9, -0.5, -0.4])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
