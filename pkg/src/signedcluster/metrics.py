"""Partition quality: Adjusted Rand Index and structural-balance penalty."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from signedcluster.errors import InvalidArgumentError
from signedcluster.graph import Partition, SignedGraph


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int


def contingency_table(truth: Partition, pred: Partition) -> ContingencyTable:
    if truth.n != pred.n:
        raise InvalidArgumentError(f"partitions cover {truth.n} and {pred.n} vertices")
    counts = np.zeros((truth.k, pred.k), dtype=np.int64)
    np.add.at(counts, (truth.assignment, pred.assignment), 1)
    return ContingencyTable(counts, counts.sum(axis=1), counts.sum(axis=0), truth.n)


def _pairs(x: np.ndarray) -> int:
    return sum(int(v) * (int(v) - 1) // 2 for v in x.ravel())


def ari(truth: Partition, pred: Partition) -> float:
    """Adjusted Rand Index between two partitions of the same vertex set.

    Evaluated in exact integer arithmetic. When the chance-corrected
    denominator vanishes (both partitions single-cluster, or both all
    singletons) the result is 1.0 for equal partitions and 0.0 otherwise.
    """
    if truth.n != pred.n:
        raise InvalidArgumentError(f"partitions cover {truth.n} and {pred.n} vertices")
    if truth.n < 2:
        raise InvalidArgumentError("ARI needs at least two items")
    t = contingency_table(truth, pred)
    index = _pairs(t.counts)
    a = _pairs(t.row_sums)
    b = _pairs(t.col_sums)
    total = t.n * (t.n - 1) // 2
    # ARI = (index - ab/N) / ((a+b)/2 - ab/N), scaled by 2N to stay integral
    num = 2 * total * index - 2 * a * b
    den = total * (a + b) - 2 * a * b
    if den == 0:
        return 1.0 if truth == pred else 0.0
    return num / den


def penalty(g: SignedGraph, p: Partition) -> float:
    """Negative weight kept inside clusters plus positive weight cut between them."""
    if p.n != g.n:
        raise InvalidArgumentError(f"partition covers {p.n} vertices, graph has {g.n}")
    a = p.assignment
    iu = np.triu_indices(g.n, 1)
    w = g.weights[iu]
    same = a[iu[0]] == a[iu[1]]
    return float(-np.sum(w[same & (w < 0)]) + np.sum(w[~same & (w > 0)]))
