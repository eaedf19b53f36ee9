"""Classical comparison pipeline: correlation distance, PAM k-medoids, eigengap k.

The baseline needs ``k`` up front; when it is not given it is estimated from
the spectrum of the signed Laplacian ``D - W`` with ``D_ii = sum_j |w_ij|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from signedcluster.errors import InvalidArgumentError, NumericalError
from signedcluster.graph import Partition, SignedGraph

MAX_SWAPS = 10_000


@dataclass(frozen=True)
class DistanceMatrix:
    d: np.ndarray
    alpha: float

    @property
    def n(self) -> int:
        return self.d.shape[0]


def correlation_to_distance(g: SignedGraph, alpha: float = 2.0) -> DistanceMatrix:
    """``d_ij = sqrt(alpha * (1 - w_ij))`` off the diagonal, 0 on it."""
    if not alpha > 0:
        raise InvalidArgumentError(f"alpha must be positive, got {alpha}")
    d = np.sqrt(alpha * np.clip(1.0 - g.weights, 0.0, None))
    np.fill_diagonal(d, 0.0)
    d.setflags(write=False)
    return DistanceMatrix(d, float(alpha))


@dataclass(frozen=True)
class PamResult:
    partition: Partition
    medoids: tuple[int, ...]
    cost: float
    swaps: int
    cost_history: tuple[float, ...]


def _assign(d: np.ndarray, medoids: list[int]) -> tuple[np.ndarray, float]:
    sub = d[:, medoids]
    nearest = np.argmin(sub, axis=1)  # first minimum = lowest medoid index, medoids kept sorted
    return nearest, float(sub[np.arange(d.shape[0]), nearest].sum())


def pam(dist: DistanceMatrix, k: int) -> PamResult:
    """Partitioning Around Medoids: greedy BUILD, then best-improvement SWAP.

    All ties are broken towards the lowest vertex index.
    """
    d = dist.d
    n = dist.n
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must satisfy 1 <= k <= {n}, got {k}")

    # BUILD
    medoids = [int(np.argmin(d.sum(axis=1)))]
    nearest = d[:, medoids[0]].copy()
    while len(medoids) < k:
        cand_cost = np.minimum(nearest[None, :], d).sum(axis=1)
        cand_cost[medoids] = np.inf
        m = int(np.argmin(cand_cost))
        medoids.append(m)
        nearest = np.minimum(nearest, d[:, m])
    medoids.sort()

    # SWAP
    _, cost = _assign(d, medoids)
    history = [cost]
    swaps = 0
    while swaps < MAX_SWAPS:
        best_delta, best_pair = -1e-12, None
        is_medoid = np.zeros(n, dtype=bool)
        is_medoid[medoids] = True
        for pos, m in enumerate(medoids):
            others = medoids[:pos] + medoids[pos + 1:]
            without = d[:, others].min(axis=1) if others else np.full(n, np.inf)
            new_cost = np.minimum(without[None, :], d).sum(axis=1)
            new_cost[is_medoid] = np.inf
            h = int(np.argmin(new_cost))
            delta = new_cost[h] - cost
            if delta < best_delta:
                best_delta, best_pair = delta, (pos, h)
        if best_pair is None:
            break
        pos, h = best_pair
        medoids[pos] = h
        medoids.sort()
        _, cost = _assign(d, medoids)
        history.append(cost)
        swaps += 1
    else:
        raise NumericalError(f"PAM did not converge within {MAX_SWAPS} swaps")

    labels, cost = _assign(d, medoids)
    return PamResult(Partition(labels), tuple(medoids), cost, swaps, tuple(history))


def pam_cluster(dist: DistanceMatrix, k: int, seed: int = 0) -> Partition:
    # BUILD and SWAP are deterministic; seed is accepted for interface symmetry
    return pam(dist, k).partition


def signed_laplacian(g: SignedGraph) -> np.ndarray:
    w = g.weights
    return np.diag(np.abs(w).sum(axis=1)) - w


def eigengap_k(g: SignedGraph, k_max: int | None = None) -> int:
    """Estimate the cluster count from the largest gap in the signed Laplacian spectrum.

    For ``k`` mutually antagonistic clusters ``D - W`` has ``k - 1`` small
    eigenvalues followed by a jump, so the candidate ``k`` is scored by
    ``lambda_k - lambda_{k-1}`` (1-based, ascending). Ties go to the smaller k.
    """
    n = g.n
    if k_max is None:
        k_max = min(n - 1, 15)
    if not 2 <= k_max <= n - 1:
        raise InvalidArgumentError(f"k_max must satisfy 2 <= k_max <= n-1 = {n - 1}, got {k_max}")
    try:
        lam = np.linalg.eigvalsh(signed_laplacian(g))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on a {n}-vertex Laplacian: {exc}") from None
    if not np.all(np.isfinite(lam)):
        raise NumericalError(f"eigensolver returned non-finite eigenvalues: {lam}")
    ks = np.arange(2, k_max + 1)
    gaps = lam[ks - 1] - lam[ks - 2]
    return int(ks[np.argmax(gaps)])


@dataclass(frozen=True)
class BaselineRun:
    partition: Partition
    k: int
    k_source: str  # "given" or "eigengap"


def baseline_cluster(g: SignedGraph, alpha: float = 2.0, k: int | None = None, seed: int = 0) -> BaselineRun:
    """Eigengap k (unless given) followed by PAM on the correlation distance."""
    if k is None:
        if g.n < 3:
            k_est, source = 1, "eigengap"
        else:
            k_est, source = eigengap_k(g), "eigengap"
    else:
        k_est, source = int(k), "given"
    part = pam_cluster(correlation_to_distance(g, alpha), k_est, seed)
    return BaselineRun(part, k_est, source)
