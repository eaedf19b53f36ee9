import inspect
import itertools

import numpy as np
import pytest

from signedcluster.errors import CapacityError
from signedcluster.gcsq import exhaustive_best_partition, gcsq_cluster, restricted_growth_strings
from signedcluster.graph import Partition, SignedGraph, intra_weight, total_edge_weight
from signedcluster.metrics import ari
from signedcluster.qubo import SolverConfig, register_solver, unregister_solver
from signedcluster.synthgen import SynthSpec, generate

from conftest import random_signed_graph

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]


def set_partitions(items):
    """Independent recursive enumeration of all set partitions."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def best_by_enumeration(g):
    best, arg = -np.inf, None
    for blocks in set_partitions(list(range(g.n))):
        p = Partition.from_clusters(blocks, g.n)
        v = intra_weight(g, p)
        if v > best + 1e-9:
            best, arg = v, p
    return best, arg


class TestGcsqExamples:
    def test_split_triangle(self, split_triangle):
        run = gcsq_cluster(split_triangle)
        assert run.partition == Partition([0, 0, 1])
        assert run.k == 2
        first = run.trace[0]
        assert first.accepted and first.cut_value == pytest.approx(-0.9)
        pair = next(r for r in run.trace if r.vertices == (0, 1))
        assert not pair.accepted and pair.cut_value == pytest.approx(0.9)
        best, _ = best_by_enumeration(split_triangle)
        assert run.objective == pytest.approx(best)

    def test_all_positive_triangle(self):
        run = gcsq_cluster(SignedGraph.from_upper(3, [0.2, 0.7, 0.4]))
        assert run.k == 1

    def test_all_negative_triangle(self):
        g = SignedGraph.from_upper(3, [-1.0, -1.0, -1.0])
        run = gcsq_cluster(g)
        assert run.k == 3
        accepted = [r.cut_value for r in run.trace if r.accepted]
        assert accepted == [pytest.approx(-2.0), pytest.approx(-1.0)]
        # singletons are the unique optimum
        values = sorted(intra_weight(g, Partition.from_clusters(b, 3)) for b in set_partitions([0, 1, 2]))
        assert values[-1] == 0.0 and values[-2] < 0

    def test_single_vertex(self):
        run = gcsq_cluster(SignedGraph([[0.0]]))
        assert run.k == 1 and run.objective == 0.0

    def test_zero_weight_cut_not_taken(self):
        run = gcsq_cluster(SignedGraph(np.zeros((4, 4))))
        assert run.k == 1

    def test_trace_json(self, split_triangle):
        rows = gcsq_cluster(split_triangle).trace_json()
        assert rows[0] == {"vertices": [0, 1, 2], "cut_value": pytest.approx(-0.9), "accepted": True,
                           "solver_name": "exact", "seed": 0}


class TestGcsqProperties:
    def graphs(self, count=60, seed=0):
        rng = np.random.default_rng(seed)
        for _ in range(count):
            yield random_signed_graph(int(rng.integers(1, 14)), rng)

    def test_run_invariants(self):
        for g in self.graphs():
            run = gcsq_cluster(g)
            assert run.objective == pytest.approx(intra_weight(g, run.partition), abs=1e-9)
            for rec in run.trace:
                assert (rec.cut_value < 0) if rec.accepted else (rec.cut_value >= 0)

    def test_monotone_improvement(self):
        for g in self.graphs(seed=1):
            run = gcsq_cluster(g)
            clusters = [tuple(range(g.n))]
            value = total_edge_weight(g)
            for rec in run.trace:
                if not rec.accepted:
                    continue
                clusters.remove(rec.vertices)
                clusters.extend(rec.sides)
                new = intra_weight(g, Partition.from_clusters(clusters, g.n))
                assert new - value == pytest.approx(-rec.cut_value, abs=1e-9)
                assert new > value
                value = new
            assert value == pytest.approx(run.objective, abs=1e-9)

    def test_never_below_single_cluster(self):
        for g in self.graphs(seed=2):
            assert gcsq_cluster(g).objective >= total_edge_weight(g) - 1e-9

    def test_bounded_by_global_optimum(self):
        for g in self.graphs(count=40, seed=3):
            if g.n > 8:
                continue
            assert gcsq_cluster(g).objective <= intra_weight(g, exhaustive_best_partition(g)) + 1e-9

    def test_two_cluster_recovery(self):
        # with two planted clusters the planted cut crosses every negative edge
        # and nothing else, so it is the unique minimum cut
        for n in (6, 10, 20):
            for seed in range(30):
                g, truth = generate(SynthSpec(n, 2, seed=seed))
                assert ari(truth, gcsq_cluster(g).partition) == 1.0

    def test_k_is_not_an_input(self):
        assert "k" not in inspect.signature(gcsq_cluster).parameters
        ks = {gcsq_cluster(generate(SynthSpec(12, k, seed=1))[0]).k for k in (2, 3, 4)}
        assert len(ks) > 1

    def test_deterministic_with_anneal(self):
        g, _ = generate(SynthSpec(40, 4, noise=0.05, seed=3))
        cfg = SolverConfig(backend="anneal", seed=9, sweeps=300)
        assert gcsq_cluster(g, cfg) == gcsq_cluster(g, cfg)

    def test_solver_error_annotated(self):
        def broken(q, cfg):
            raise CapacityError("device has too few qubits")

        register_solver("broken", broken)
        try:
            with pytest.raises(CapacityError, match=r"while splitting a 5-vertex subgraph \[0, 1, 2, 3, 4\]"):
                gcsq_cluster(random_signed_graph(5, np.random.default_rng(0)), SolverConfig(backend="broken"))
        finally:
            unregister_solver("broken")


class TestExhaustive:
    def test_rgs_counts_bell(self):
        for n in range(1, 11):
            rgs = restricted_growth_strings(n)
            assert rgs.shape == (BELL[n], n)
            assert len({tuple(r) for r in rgs.tolist()}) == BELL[n]
        rows = [tuple(r) for r in restricted_growth_strings(5).tolist()]
        assert rows == sorted(rows)

    def test_single_vertex(self):
        assert exhaustive_best_partition(SignedGraph([[0.0]])).k == 1

    def test_triangle(self, split_triangle):
        p = exhaustive_best_partition(split_triangle)
        assert p == Partition([0, 0, 1])
        assert intra_weight(split_triangle, p) == pytest.approx(0.9)

    def test_planted_is_optimal(self):
        g, truth = generate(SynthSpec(8, 3, seed=5))
        assert exhaustive_best_partition(g) == truth

    def test_matches_independent_enumeration(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            g = random_signed_graph(int(rng.integers(1, 7)), rng)
            best, _ = best_by_enumeration(g)
            assert intra_weight(g, exhaustive_best_partition(g)) == pytest.approx(best, abs=1e-9)

    def test_tie_break_fewest_clusters(self):
        # zero weights: every partition scores 0, single cluster wins
        assert exhaustive_best_partition(SignedGraph(np.zeros((4, 4)))).k == 1

    def test_capacity(self):
        with pytest.raises(CapacityError):
            exhaustive_best_partition(SignedGraph(np.zeros((11, 11))))
