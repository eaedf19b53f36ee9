"""Signed graph model, partitions, and cut / coalition arithmetic.

Graphs are stored as dense symmetric matrices. Every other module consumes a
:class:`SignedGraph` and produces or scores a :class:`Partition`.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from signedcluster.errors import InvalidArgumentError

WEIGHT_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class SignedGraph:
    """Complete signed, weighted, undirected graph over ``n`` vertices.

    Args:
        weights: square matrix with entries in [-1, 1]. It must be exactly
            symmetric with a zero diagonal.
        labels: optional unique vertex names (tickers, synthetic ids).

    Raises:
        InvalidArgumentError: if any invariant is violated.
    """

    __slots__ = ("_weights", "_labels")

    def __init__(self, weights, labels: Sequence[str] | None = None):
        w = np.array(weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InvalidArgumentError(f"weights must be a square matrix, got shape {w.shape}")
        if w.shape[0] < 1:
            raise InvalidArgumentError("a graph needs at least one vertex")
        if not np.all(np.isfinite(w)):
            raise InvalidArgumentError("weights contain non-finite entries")
        if not np.array_equal(w, w.T):
            i, j = np.argwhere(w != w.T)[0]
            raise InvalidArgumentError(f"weights are not symmetric at ({i}, {j})")
        if np.any(np.diag(w) != 0.0):
            raise InvalidArgumentError("weights must have a zero diagonal")
        if np.max(np.abs(w)) > 1.0 + WEIGHT_TOL:
            raise InvalidArgumentError("weights must lie in [-1, 1]")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != w.shape[0]:
                raise InvalidArgumentError(
                    f"got {len(labels)} labels for {w.shape[0]} vertices"
                )
            if len(set(labels)) != len(labels):
                raise InvalidArgumentError("vertex labels must be unique")
        self._weights = _frozen(w)
        self._labels = labels

    @classmethod
    def from_upper(cls, n: int, upper: Iterable[float], labels=None) -> "SignedGraph":
        """Build from the row-major strict upper triangle."""
        w = np.zeros((n, n))
        iu = np.triu_indices(n, 1)
        w[iu] = np.fromiter(upper, dtype=np.float64, count=len(iu[0]))
        return cls(w + w.T, labels)

    @property
    def n(self) -> int:
        return self._weights.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return self._labels == other._labels and np.array_equal(self._weights, other._weights)

    def __hash__(self):
        return hash((self.n, self._weights.tobytes(), self._labels))

    def __repr__(self) -> str:
        return f"SignedGraph(n={self.n})"


class Partition:
    """A coalition structure: every vertex carries exactly one cluster id.

    Ids are relabeled by first appearance on construction, so two partitions
    that group vertices the same way compare equal.
    """

    __slots__ = ("_assignment", "_k")

    def __init__(self, assignment: Sequence[int]):
        a = np.asarray(assignment)
        if a.ndim != 1 or a.size < 1:
            raise InvalidArgumentError("assignment must be a non-empty 1-D sequence")
        if not np.issubdtype(a.dtype, np.integer):
            if not np.all(np.equal(np.mod(a, 1), 0)):
                raise InvalidArgumentError("cluster ids must be integers")
        remap: dict[int, int] = {}
        out = np.empty(a.size, dtype=np.int64)
        for i, c in enumerate(a.tolist()):
            out[i] = remap.setdefault(int(c), len(remap))
        self._assignment = _frozen(out)
        self._k = len(remap)

    @classmethod
    def from_clusters(cls, clusters: Iterable[Iterable[int]], n: int) -> "Partition":
        a = np.full(n, -1, dtype=np.int64)
        for cid, members in enumerate(clusters):
            for v in members:
                if not 0 <= v < n:
                    raise InvalidArgumentError(f"vertex {v} out of range for n={n}")
                if a[v] != -1:
                    raise InvalidArgumentError(f"vertex {v} appears in two clusters")
                a[v] = cid
        if np.any(a < 0):
            raise InvalidArgumentError(f"vertices {np.flatnonzero(a < 0).tolist()} are unassigned")
        return cls(a)

    @property
    def assignment(self) -> np.ndarray:
        return self._assignment

    @property
    def k(self) -> int:
        return self._k

    @property
    def n(self) -> int:
        return self._assignment.size

    def clusters(self) -> list[list[int]]:
        """Vertex lists per cluster, in id order."""
        out: list[list[int]] = [[] for _ in range(self._k)]
        for v, c in enumerate(self._assignment.tolist()):
            out[c].append(v)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self._assignment, other._assignment)

    def __hash__(self):
        return hash(self._assignment.tobytes())

    def __repr__(self) -> str:
        return f"Partition(k={self.k}, assignment={self._assignment.tolist()})"

    def to_json(self) -> dict:
        return {"assignment": self._assignment.tolist(), "k": self._k}

    @classmethod
    def from_json(cls, obj: dict) -> "Partition":
        try:
            p = cls(obj["assignment"])
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed partition object: {exc}") from None
        if "k" in obj and int(obj["k"]) != p.k:
            raise InvalidArgumentError(f"partition declares k={obj['k']} but uses {p.k} ids")
        return p


@dataclass(frozen=True)
class Cut:
    """A bipartition of a (sub)graph and the total weight crossing it."""

    side: tuple[int, ...]
    value: float


def _as_bits(side, n: int) -> np.ndarray:
    s = np.asarray(side)
    if s.ndim != 1 or s.size != n:
        raise InvalidArgumentError(f"side has length {s.size}, graph has {n} vertices")
    return s.astype(bool)


def total_edge_weight(g: SignedGraph) -> float:
    """Sum of w_ij over all pairs i < j."""
    return float(np.sum(np.triu(g.weights, 1)))


def cut_value(g: SignedGraph, side) -> float:
    """Total weight of edges whose endpoints fall on different sides."""
    s = _as_bits(side, g.n)
    return float(np.sum(g.weights[np.ix_(s, ~s)]))


def make_cut(g: SignedGraph, side) -> Cut:
    s = _as_bits(side, g.n)
    return Cut(tuple(int(b) for b in s), cut_value(g, s))


def intra_weight(g: SignedGraph, p: Partition) -> float:
    """Coalition-structure value: sum of edge weights inside clusters."""
    if p.n != g.n:
        raise InvalidArgumentError(f"partition covers {p.n} vertices, graph has {g.n}")
    a = p.assignment
    same = a[:, None] == a[None, :]
    return float(np.sum(np.triu(np.where(same, g.weights, 0.0), 1)))


def induced_subgraph(g: SignedGraph, vertices: Sequence[int]) -> tuple[SignedGraph, np.ndarray]:
    """Subgraph on ``vertices`` (in the given order) and the local-to-parent index map."""
    idx = np.asarray(vertices, dtype=np.int64).reshape(-1)
    if idx.size == 0:
        raise InvalidArgumentError("vertex selection is empty")
    if np.any(idx < 0) or np.any(idx >= g.n):
        raise InvalidArgumentError(f"vertex index out of range for n={g.n}")
    if np.unique(idx).size != idx.size:
        raise InvalidArgumentError("vertex selection contains duplicates")
    labels = None if g.labels is None else [g.labels[i] for i in idx]
    sub = SignedGraph(g.weights[np.ix_(idx, idx)], labels)
    return sub, _frozen(idx.copy())


# -- file formats -------------------------------------------------------------

def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_graph_csv(path: str | os.PathLike) -> SignedGraph:
    """Load a graph CSV: optional header row of labels, then n rows of n reals."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InvalidArgumentError(f"{path}: empty graph file")
    labels = None
    if not all(_is_number(c) for c in rows[0]):
        labels = [c.strip() for c in rows[0]]
        rows = rows[1:]
    try:
        w = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: {exc}") from None
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InvalidArgumentError(f"{path}: expected an n x n matrix, got {len(rows)} ragged rows")
    try:
        return SignedGraph(w, labels)
    except InvalidArgumentError as exc:
        raise InvalidArgumentError(f"{path}: {exc}") from None


def write_graph_csv(g: SignedGraph, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        if g.labels is not None:
            wr.writerow(g.labels)
        for row in g.weights.tolist():
            wr.writerow([repr(x) for x in row])


def read_partition_json(path: str | os.PathLike) -> Partition:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"{path}: {exc}") from None
    return Partition.from_json(obj)


def write_partition_json(p: Partition, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(p.to_json(), fh)
        fh.write("\n")
