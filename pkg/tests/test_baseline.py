import itertools

import numpy as np
import pytest

from signedcluster.baseline import (
    baseline_cluster,
    correlation_to_distance,
    eigengap_k,
    pam,
    pam_cluster,
    signed_laplacian,
)
from signedcluster.errors import InvalidArgumentError
from signedcluster.gcsq import exhaustive_best_partition
from signedcluster.graph import Partition, SignedGraph
from signedcluster.metrics import ari
from signedcluster.synthgen import SynthSpec, generate

from conftest import random_signed_graph


def clique_graph(k, size=4):
    a = np.repeat(np.arange(k), size)
    w = np.where(a[:, None] == a[None, :], 1.0, -1.0)
    np.fill_diagonal(w, 0.0)
    return SignedGraph(w), Partition(a)


def laplacian_spectrum(g):
    """Spectrum of D - W assembled entry by entry."""
    n = g.n
    L = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                L[i, i] = sum(abs(g.weights[i, m]) for m in range(n))
            else:
                L[i, j] = -g.weights[i, j]
    return np.sort(np.linalg.eigvals(L).real)


def largest_gap_k(lam, k_max):
    gaps = {k: lam[k - 1] - lam[k - 2] for k in range(2, k_max + 1)}
    return max(gaps, key=lambda k: (gaps[k], -k))


class TestDistance:
    def test_examples(self):
        g = SignedGraph.from_upper(3, [1.0, 0.0, -1.0])
        d = correlation_to_distance(g, alpha=2).d
        assert d[0, 1] == 0.0
        assert d[0, 2] == pytest.approx(np.sqrt(2))
        assert d[1, 2] == pytest.approx(2.0)
        assert np.all(np.diag(d) == 0)

    def test_alpha_checked(self, triangle):
        for alpha in (0, -1):
            with pytest.raises(InvalidArgumentError):
                correlation_to_distance(triangle, alpha)

    def test_monotone_and_bounded(self):
        rng = np.random.default_rng(0)
        rho = np.sort(rng.uniform(-1, 1, 200))
        for alpha in (0.5, 2.0, 3.0):
            d = np.array([correlation_to_distance(SignedGraph.from_upper(2, [r]), alpha).d[0, 1] for r in rho])
            assert np.all(np.diff(d) < 0)
            assert np.all((d >= 0) & (d <= np.sqrt(2 * alpha) + 1e-12))


class TestPam:
    def test_k_equals_n(self):
        g = random_signed_graph(6, np.random.default_rng(1))
        res = pam(correlation_to_distance(g), 6)
        assert res.cost == 0.0 and res.partition.k == 6 and res.medoids == tuple(range(6))

    def test_k_one(self):
        g = random_signed_graph(9, np.random.default_rng(2))
        d = correlation_to_distance(g)
        res = pam(d, 1)
        assert res.medoids == (int(np.argmin(d.d.sum(axis=1))),)
        assert res.partition.k == 1

    def test_two_groups_brute_force(self):
        rng = np.random.default_rng(3)
        pts = np.vstack([rng.normal(0, 0.3, (4, 2)), rng.normal(5, 0.3, (4, 2))])
        rng.shuffle(pts)
        D = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        from signedcluster.baseline import DistanceMatrix

        dm = DistanceMatrix(D, 1.0)
        best = min(itertools.combinations(range(8), 2), key=lambda m: D[:, list(m)].min(axis=1).sum())
        expected = Partition(np.argmin(D[:, list(best)], axis=1))
        assert pam_cluster(dm, 2) == expected
        truth = Partition((pts[:, 0] > 2.5).astype(int))
        assert expected == truth

    def test_cost_non_increasing(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            g = random_signed_graph(int(rng.integers(5, 30)), rng)
            res = pam(correlation_to_distance(g), int(rng.integers(1, 5)))
            assert all(b <= a + 1e-12 for a, b in zip(res.cost_history, res.cost_history[1:]))
            assert res.swaps < 10_000

    def test_k_range(self, triangle):
        d = correlation_to_distance(triangle)
        for k in (0, 4):
            with pytest.raises(InvalidArgumentError):
                pam(d, k)


class TestEigengap:
    def test_two_cluster_synthetic(self):
        g, _ = generate(SynthSpec(10, 2, seed=0))
        lam = laplacian_spectrum(g)
        assert largest_gap_k(lam, 9) == 2
        assert eigengap_k(g) == 2

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_antagonistic_cliques(self, k):
        g, _ = clique_graph(k)
        k_max = min(g.n - 1, 15)
        assert largest_gap_k(laplacian_spectrum(g), k_max) == k
        assert eigengap_k(g, k_max) == k

    def test_only_candidate(self, triangle):
        assert eigengap_k(triangle, 2) == 2

    def test_k_max_range(self, triangle):
        for k_max in (1, 3):
            with pytest.raises(InvalidArgumentError):
                eigengap_k(triangle, k_max)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            g, _ = generate(SynthSpec(int(rng.integers(6, 25)), int(rng.integers(2, 5)), noise=0.1,
                                      seed=int(rng.integers(1 << 30))))
            perm = rng.permutation(g.n)
            h = SignedGraph(g.weights[np.ix_(perm, perm)])
            assert eigengap_k(g) == eigengap_k(h)

    def test_laplacian_psd(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            g = random_signed_graph(int(rng.integers(2, 30)), rng)
            assert np.linalg.eigvalsh(signed_laplacian(g)).min() >= -1e-8


class TestBaselineCluster:
    def test_k_given_skips_eigengap(self, triangle):
        run = baseline_cluster(triangle, k=2)
        assert run.k_source == "given" and run.k == 2 and run.partition.k == 2

    def test_recovers_well_separated(self):
        fixtures = [generate(SynthSpec(n, 2, seed=s)) for n in (8, 10, 12) for s in range(5)]
        fixtures += [clique_graph(3, 3), clique_graph(4, 3)]
        for g, truth in fixtures:
            if g.n <= 10:
                assert exhaustive_best_partition(g) == truth
            run = baseline_cluster(g)
            assert run.k_source == "eigengap"
            assert ari(truth, run.partition) == 1.0

    def test_wrong_k_hurts(self):
        g, truth = generate(SynthSpec(10, 2, seed=0))
        assert ari(truth, baseline_cluster(g, k=3).partition) < 1.0
