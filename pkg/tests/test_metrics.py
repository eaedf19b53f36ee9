import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import adjusted_rand_score

from signedcluster.errors import InvalidArgumentError
from signedcluster.graph import Partition, SignedGraph
from signedcluster.metrics import ari, contingency_table, penalty
from signedcluster.synthgen import SynthSpec, generate

from conftest import random_signed_graph

labels = st.lists(st.integers(0, 4), min_size=2, max_size=25)


def ari_by_pairs(t, p):
    """Rand-index correction from raw pair agreements."""
    n = len(t)
    pairs = list(itertools.combinations(range(n), 2))
    same_t = [t[i] == t[j] for i, j in pairs]
    same_p = [p[i] == p[j] for i, j in pairs]
    both = sum(a and b for a, b in zip(same_t, same_p))
    a, b, total = sum(same_t), sum(same_p), len(pairs)
    expected = a * b / total
    top = (a + b) / 2
    if top == expected:
        return None
    return (both - expected) / (top - expected)


def penalty_by_pairs(g, a):
    total = 0.0
    for i, j in itertools.combinations(range(g.n), 2):
        w = g.weights[i, j]
        if a[i] == a[j] and w < 0:
            total += -w
        elif a[i] != a[j] and w > 0:
            total += w
    return total


class TestAri:
    def test_relabel(self):
        assert ari(Partition([0, 0, 1, 2]), Partition([7, 7, 3, 1])) == 1.0

    def test_worked_zero(self):
        assert ari(Partition([0, 0, 1, 1]), Partition([0, 0, 0, 1])) == pytest.approx(0.0, abs=1e-12)

    def test_worked_negative(self):
        assert ari(Partition([0, 0, 1, 1]), Partition([0, 1, 0, 1])) == pytest.approx(-0.5, abs=1e-12)

    def test_degenerate(self):
        assert ari(Partition([0, 0, 0]), Partition([1, 1, 1])) == 1.0
        assert ari(Partition([0, 1, 2]), Partition([2, 1, 0])) == 1.0
        assert ari(Partition([0, 0, 0]), Partition([0, 1, 2])) == 0.0

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            ari(Partition([0, 1]), Partition([0, 1, 1]))
        with pytest.raises(InvalidArgumentError):
            ari(Partition([0]), Partition([0]))

    def test_contingency(self):
        t = contingency_table(Partition([0, 0, 1, 1]), Partition([0, 0, 0, 1]))
        assert t.counts.tolist() == [[2, 0], [1, 1]]
        assert t.row_sums.tolist() == [2, 2] and t.col_sums.tolist() == [3, 1] and t.n == 4

    @settings(max_examples=200)
    @given(st.data())
    def test_matches_pair_counting_and_sklearn(self, data):
        t = data.draw(labels)
        p = data.draw(st.lists(st.integers(0, 4), min_size=len(t), max_size=len(t)))
        got = ari(Partition(t), Partition(p))
        ref = ari_by_pairs(t, p)
        if ref is not None:
            assert got == pytest.approx(ref, abs=1e-12)
        assert got == pytest.approx(adjusted_rand_score(t, p), abs=1e-12)

    @settings(max_examples=100)
    @given(labels, labels)
    def test_symmetric(self, t, p):
        m = min(len(t), len(p))
        a, b = Partition(t[:m]), Partition(p[:m])
        assert ari(a, b) == pytest.approx(ari(b, a), abs=1e-12)

    @settings(max_examples=100)
    @given(labels, st.permutations(range(5)))
    def test_self_and_relabel(self, t, perm):
        assert ari(Partition(t), Partition(t)) == 1.0
        assert ari(Partition(t), Partition([perm[c] for c in t])) == 1.0


class TestPenalty:
    def test_triangle(self):
        g = SignedGraph.from_upper(3, [-0.2, 0.3, -0.1])
        assert penalty(g, Partition([0, 0, 1])) == pytest.approx(0.5, abs=1e-12)

    def test_planted_zero(self):
        for seed in range(20):
            g, truth = generate(SynthSpec(15, 4, seed=seed))
            assert penalty(g, truth) == 0.0

    def test_closed_forms(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            g = random_signed_graph(int(rng.integers(2, 12)), rng)
            w = np.triu(g.weights, 1)
            assert penalty(g, Partition(np.zeros(g.n))) == pytest.approx(-w[w < 0].sum(), abs=1e-9)
            assert penalty(g, Partition(np.arange(g.n))) == pytest.approx(w[w > 0].sum(), abs=1e-9)

    def test_two_way_matches_scan(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            g = random_signed_graph(int(rng.integers(2, 13)), rng)
            a = rng.integers(0, 2, g.n)
            assert penalty(g, Partition(a)) == pytest.approx(penalty_by_pairs(g, a), abs=1e-9)

    def test_zero_weights_ignored(self):
        g = SignedGraph(np.zeros((3, 3)))
        assert penalty(g, Partition([0, 1, 1])) == 0.0

    def test_relabel_invariant_and_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            g = random_signed_graph(8, rng)
            a = rng.integers(0, 3, 8)
            v = penalty(g, Partition(a))
            assert v >= 0
            assert penalty(g, Partition((a + 1) % 3)) == pytest.approx(v, abs=1e-12)

    def test_length_mismatch(self, triangle):
        with pytest.raises(InvalidArgumentError):
            penalty(triangle, Partition([0, 1]))
