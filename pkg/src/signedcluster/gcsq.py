"""GCS-Q: top-down coalition structure generation by repeated signed min-cuts.

Starting from the grand coalition, each subgraph is bipartitioned by its
minimum cut. A negative cut means the two halves are worth more apart than
together (``v(S) + v(S') = v(S u S') - cut``), so the split is kept and both
halves are processed further; otherwise the subgraph is final. The number of
clusters falls out of the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from signedcluster.errors import CapacityError, SignedClusterError
from signedcluster.graph import Partition, SignedGraph, cut_value, induced_subgraph, intra_weight
from signedcluster.qubo import SolverConfig, build_mincut_qubo, solve

SPLIT_TOL = 1e-12
EXHAUSTIVE_MAX_N = 10


@dataclass(frozen=True)
class SplitRecord:
    """One visited subgraph: its vertices (parent indices) and the cut tried."""

    vertices: tuple[int, ...]
    cut_value: float
    accepted: bool
    solver_name: str
    seed: int | None = None
    sides: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "cut_value": self.cut_value,
            "accepted": self.accepted,
            "solver_name": self.solver_name,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class GcsqRun:
    partition: Partition
    trace: tuple[SplitRecord, ...]
    objective: float

    @property
    def k(self) -> int:
        return self.partition.k

    def trace_json(self) -> list[dict]:
        return [r.to_json() for r in self.trace]


def _bipartition(g: SignedGraph, vertices: tuple[int, ...], cfg: SolverConfig):
    """Min-cut of the subgraph on ``vertices``: (cut value, side bits, solver name, diagnostics)."""
    m = len(vertices)
    if m == 1:
        return 0.0, (0,), "trivial", {}
    if m == 2:
        w = float(g.weights[vertices[0], vertices[1]])
        return w, (0, 1), "pair", {}
    sub, _ = induced_subgraph(g, vertices)
    try:
        res = solve(build_mincut_qubo(sub), cfg)
    except SignedClusterError as exc:
        shown = list(vertices[:12]) + (["..."] if m > 12 else [])
        raise type(exc)(f"{exc} (while splitting a {m}-vertex subgraph {shown})") from exc
    return cut_value(sub, res.bits), res.bits, res.solver_name, res.diagnostics


def gcsq_cluster(g: SignedGraph, cfg: SolverConfig = SolverConfig()) -> GcsqRun:
    """Cluster ``g`` by recursive signed min-cuts; ``k`` is determined by the data.

    Subgraphs are processed depth-first with the larger side of every accepted
    split first, which fixes the order of the trace.
    """
    stack: list[tuple[int, ...]] = [tuple(range(g.n))]
    clusters: list[tuple[int, ...]] = []
    trace: list[SplitRecord] = []
    while stack:
        verts = stack.pop()
        value, bits, solver_name, diag = _bipartition(g, verts, cfg)
        seed = diag.get("seed", cfg.seed if solver_name not in ("trivial", "pair") else None)
        if value < -SPLIT_TOL:
            one = tuple(v for v, b in zip(verts, bits) if b)
            zero = tuple(v for v, b in zip(verts, bits) if not b)
            # larger side first; ties go to the side holding the smallest vertex
            first, second = sorted((one, zero), key=lambda s: (-len(s), s[0]))
            trace.append(SplitRecord(verts, value, True, solver_name, seed, (first, second), diag))
            stack.append(second)
            stack.append(first)
        else:
            trace.append(SplitRecord(verts, value, False, solver_name, seed, None, diag))
            clusters.append(verts)
    partition = Partition.from_clusters(clusters, g.n)
    return GcsqRun(partition, tuple(trace), intra_weight(g, partition))


@lru_cache(maxsize=None)
def restricted_growth_strings(n: int) -> np.ndarray:
    """Every set partition of ``n`` items as a canonical label row, in lexicographic order."""
    rows = np.zeros((1, 1), dtype=np.int8)
    for _ in range(1, n):
        top = rows.max(axis=1)
        reps = top + 2
        base = np.repeat(rows, reps, axis=0)
        starts = np.cumsum(reps) - reps
        nxt = np.arange(base.shape[0]) - np.repeat(starts, reps)
        rows = np.hstack([base, nxt[:, None].astype(np.int8)])
    order = np.lexsort(rows.T[::-1])
    out = rows[order]
    out.setflags(write=False)
    return out


def exhaustive_best_partition(g: SignedGraph) -> Partition:
    """Partition maximizing total intra-cluster weight, by enumeration.

    Ties (within 1e-9) go to the fewest clusters, then the lexicographically
    smallest assignment.
    """
    if g.n > EXHAUSTIVE_MAX_N:
        raise CapacityError(
            f"exhaustive partition search is limited to n <= {EXHAUSTIVE_MAX_N}, got n={g.n}"
        )
    rgs = restricted_growth_strings(g.n)
    obj = np.zeros(rgs.shape[0])
    iu, ju = np.triu_indices(g.n, 1)
    for i, j in zip(iu, ju):
        obj += g.weights[i, j] * (rgs[:, i] == rgs[:, j])
    ks = rgs.max(axis=1).astype(np.int64) + 1
    near = obj >= obj.max() - 1e-9
    kmin = ks[near].min()
    pick = int(np.flatnonzero(near & (ks == kmin))[0])
    return Partition(rgs[pick])
