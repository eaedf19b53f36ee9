"""Planted-partition generator for structurally balanced signed graphs.

Cluster sizes come from a Dirichlet draw (every cluster non-empty), intra
weights are uniform on a positive range and inter weights uniform on a
negative range. An optional noise level resamples each edge from the opposite
range with the given probability.

All randomness flows through one ``numpy.random.Generator`` backed by PCG64
and seeded through ``SeedSequence(seed)``, in a fixed draw order: Dirichlet
proportions, vertex permutation, edge magnitudes, noise coins.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from signedcluster.errors import InvalidArgumentError
from signedcluster.graph import Partition, SignedGraph

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence(seed)"


@dataclass(frozen=True)
class SynthSpec:
    n: int
    k: int
    intra: tuple[float, float] = (0.1, 1.0)
    inter: tuple[float, float] = (-1.0, -0.1)
    concentration: float | tuple[float, ...] = 1.0
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.k <= self.n:
            raise InvalidArgumentError(f"need 2 <= k <= n, got n={self.n}, k={self.k}")
        for name in ("intra", "inter"):
            lo, hi = getattr(self, name)
            if not (-1.0 <= lo < hi <= 1.0):
                raise InvalidArgumentError(f"{name} range must satisfy -1 <= lo < hi <= 1, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if not 0.0 <= self.noise < 1.0:
            raise InvalidArgumentError(f"noise must lie in [0, 1), got {self.noise}")
        if self.seed < 0:
            raise InvalidArgumentError("seed must be non-negative")
        _concentration_vector(self.concentration, self.k)
        if not isinstance(self.concentration, (int, float)):
            object.__setattr__(self, "concentration", tuple(float(c) for c in self.concentration))

    def to_json(self) -> dict:
        d = asdict(self)
        d["intra"] = list(self.intra)
        d["inter"] = list(self.inter)
        if isinstance(self.concentration, tuple):
            d["concentration"] = list(self.concentration)
        d["rng"] = RNG_ALGORITHM
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SynthSpec":
        c = d.get("concentration", 1.0)
        return cls(
            n=int(d["n"]),
            k=int(d["k"]),
            intra=tuple(d.get("intra", (0.1, 1.0))),
            inter=tuple(d.get("inter", (-1.0, -0.1))),
            concentration=tuple(c) if isinstance(c, list) else float(c),
            noise=float(d.get("noise", 0.0)),
            seed=int(d.get("seed", 0)),
        )


def _concentration_vector(concentration, k: int) -> np.ndarray:
    alpha = np.broadcast_to(np.asarray(concentration, dtype=np.float64), (k,)) \
        if np.ndim(concentration) == 0 else np.asarray(concentration, dtype=np.float64)
    if alpha.shape != (k,):
        raise InvalidArgumentError(f"concentration has {alpha.size} entries for k={k}")
    if np.any(alpha <= 0) or not np.all(np.isfinite(alpha)):
        raise InvalidArgumentError("Dirichlet concentration must be positive")
    return np.array(alpha)


def _allocate(n: int, k: int, concentration, rng: np.random.Generator) -> np.ndarray:
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"cannot place {n} vertices in {k} non-empty clusters")
    props = rng.dirichlet(_concentration_vector(concentration, k))
    spare = n - k
    raw = props * spare
    sizes = np.floor(raw).astype(np.int64)
    left = spare - int(sizes.sum())
    order = np.argsort(-(raw - sizes), kind="stable")
    sizes[order[:left]] += 1
    return sizes + 1


def allocate_sizes(n: int, k: int, concentration: float | Sequence[float] = 1.0, seed: int = 0) -> np.ndarray:
    """Non-empty cluster sizes summing to ``n``, proportional to a Dirichlet draw.

    One vertex goes to each cluster up front; the remaining ``n - k`` are
    split by largest-remainder rounding.
    """
    return _allocate(n, k, concentration, np.random.default_rng(seed))


def generate(spec: SynthSpec) -> tuple[SignedGraph, Partition]:
    rng = np.random.default_rng(spec.seed)
    sizes = _allocate(spec.n, spec.k, spec.concentration, rng)
    blocks = np.repeat(np.arange(spec.k), sizes)
    assignment = np.empty(spec.n, dtype=np.int64)
    assignment[rng.permutation(spec.n)] = blocks

    iu, ju = np.triu_indices(spec.n, 1)
    u = rng.random(iu.size)
    flip = rng.random(iu.size) < spec.noise
    positive = (assignment[iu] == assignment[ju]) ^ flip
    lo = np.where(positive, spec.intra[0], spec.inter[0])
    hi = np.where(positive, spec.intra[1], spec.inter[1])
    w = np.zeros((spec.n, spec.n))
    w[iu, ju] = lo + (hi - lo) * u
    return SignedGraph(w + w.T), Partition(assignment)
