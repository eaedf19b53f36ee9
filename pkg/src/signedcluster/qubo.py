"""Min-cut QUBO construction and interchangeable solver backends.

A QUBO here is a symmetric matrix ``q`` whose diagonal holds the linear terms;
the energy of a bit vector ``x`` is ``x @ q @ x``, i.e.
``sum_i q_ii x_i + sum_{i<j} 2 q_ij x_i x_j``.

Backends:

* ``exact`` -- exhaustive enumeration, used when ``n <= threshold`` and
  falling back to annealing above it.
* ``anneal`` -- single-flip Metropolis simulated annealing with restarts.
* anything added with :func:`register_solver` -- e.g. a client for annealing
  hardware. Its answers are re-checked against the QUBO before being returned.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from signedcluster.errors import CapacityError, ConfigurationError, InvalidArgumentError, NumericalError
from signedcluster.graph import SignedGraph

ENERGY_TOL = 1e-9
MAX_EXACT_THRESHOLD = 30
# rows x columns of one enumeration block; bounds peak memory at ~32 MB
_BLOCK_ENTRIES = 1 << 22


class QuboInstance:
    """Immutable symmetric QUBO coefficient matrix."""

    __slots__ = ("_q",)

    def __init__(self, q):
        m = np.array(q, dtype=np.float64, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidArgumentError(f"q must be a non-empty square matrix, got shape {m.shape}")
        if not np.array_equal(m, m.T):
            raise InvalidArgumentError("q must be symmetric")
        if not np.all(np.isfinite(m)):
            raise InvalidArgumentError("q contains non-finite entries")
        m.setflags(write=False)
        self._q = m

    @property
    def n(self) -> int:
        return self._q.shape[0]

    @property
    def q(self) -> np.ndarray:
        return self._q

    def energy(self, bits) -> float:
        x = np.asarray(bits, dtype=np.float64)
        if x.shape != (self.n,):
            raise InvalidArgumentError(f"bit vector has shape {x.shape}, expected ({self.n},)")
        return float(x @ self._q @ x)

    def permuted(self, perm) -> "QuboInstance":
        p = np.asarray(perm)
        return QuboInstance(self._q[np.ix_(p, p)])

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            for row in self._q.tolist():
                wr.writerow([repr(v) for v in row])

    def __repr__(self) -> str:
        return f"QuboInstance(n={self.n})"


@dataclass(frozen=True)
class SolveResult:
    bits: tuple[int, ...]
    energy: float
    solver_name: str
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SolverConfig:
    """Backend choice and budget for QUBO solves.

    ``backend`` is ``"exact"`` (enumerate up to ``threshold`` variables, anneal
    above), ``"anneal"`` (always anneal) or the name of a registered solver.
    """

    backend: str = "exact"
    sweeps: int = 2000
    restarts: int = 8
    seed: int = 0
    threshold: int = 24

    def __post_init__(self):
        if not isinstance(self.backend, str) or not self.backend:
            raise ConfigurationError("backend must be a non-empty string")
        for name in ("sweeps", "restarts", "threshold"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {v!r}")
        if self.threshold > MAX_EXACT_THRESHOLD:
            raise ConfigurationError(
                f"threshold {self.threshold} exceeds the exhaustive limit {MAX_EXACT_THRESHOLD}"
            )
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed!r}")


def build_mincut_qubo(g: SignedGraph) -> QuboInstance:
    """QUBO whose energy at ``x`` equals the weight of the cut ``x`` defines."""
    w = g.weights
    q = -w.copy()
    np.fill_diagonal(q, w.sum(axis=1))
    return QuboInstance(q)


# -- exhaustive ---------------------------------------------------------------

def _bit_table(m: int) -> np.ndarray:
    """All 2**m bit rows in lexicographic order (first column most significant)."""
    idx = np.arange(1 << m, dtype=np.int64)[:, None]
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)[None, :]
    return ((idx >> shifts) & 1).astype(np.float64)


def _quad_form_rows(x: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.einsum("ij,jk,ik->i", x, q, x) if x.shape[1] else np.zeros(x.shape[0])


def solve_exact(q: QuboInstance, threshold: int = 24) -> SolveResult:
    """Global minimizer by enumerating all ``2**n`` states.

    The state space is split into a high half (leading variables) and a low
    half; each block of high states is scored against every low state with one
    matrix product. Among states within ``ENERGY_TOL`` of the minimum the
    lexicographically smallest is returned, so for cut QUBOs the first bit is 0.
    """
    n = q.n
    if n > threshold:
        raise CapacityError(
            f"exhaustive solve of {n} variables exceeds the exact-size threshold {threshold}"
        )
    Q = q.q
    h = n // 2
    l = n - h
    xl = _bit_table(l)
    e_low = _quad_form_rows(xl, Q[h:, h:])
    coupling = 2.0 * Q[:h, h:]  # (h, l)
    n_high = 1 << h
    rows_per_block = max(1, _BLOCK_ENTRIES >> l)

    def block(start: int) -> np.ndarray:
        stop = min(n_high, start + rows_per_block)
        idx = np.arange(start, stop, dtype=np.int64)[:, None]
        xh = ((idx >> np.arange(h - 1, -1, -1, dtype=np.int64)[None, :]) & 1).astype(np.float64)
        e_high = _quad_form_rows(xh, Q[:h, :h])
        return e_high[:, None] + e_low[None, :] + (xh @ coupling) @ xl.T

    starts = range(0, n_high, rows_per_block)
    block_min = np.array([block(s).min() for s in starts])
    best = block_min.min()
    first = next(s for s, m in zip(starts, block_min) if m <= best + ENERGY_TOL)
    e = block(first)
    flat = int(np.flatnonzero(e.ravel() <= best + ENERGY_TOL)[0])
    state = ((first + flat // (1 << l)) << l) | (flat % (1 << l))
    bits = tuple(int(b) for b in np.binary_repr(state, width=n)) if n else ()
    return SolveResult(
        bits=bits,
        energy=q.energy(bits),
        solver_name="exact",
        diagnostics={"evaluated_states": 1 << n},
    )


# -- simulated annealing ------------------------------------------------------

@numba.njit(cache=True)
def _anneal_chain(qoff, diag, x, betas, uniforms):
    n = x.shape[0]
    field = qoff @ x  # sum_{j != i} q_ij x_j
    energy = 0.0
    for i in range(n):
        energy += x[i] * (diag[i] + field[i])
    best_x = x.copy()
    best_e = energy
    accepted = 0
    for s in range(betas.shape[0]):
        beta = betas[s]
        for i in range(n):
            sign = 1.0 - 2.0 * x[i]
            delta = sign * (diag[i] + 2.0 * field[i])
            if delta <= 0.0 or uniforms[s, i] < math.exp(-beta * delta):
                x[i] = 1.0 - x[i]
                energy += delta
                accepted += 1
                for j in range(n):
                    field[j] += sign * qoff[j, i]
                if energy < best_e - 1e-12:
                    best_e = energy
                    best_x[:] = x
    # zero-temperature quench of the best state
    x[:] = best_x
    field = qoff @ x
    improved = True
    while improved:
        improved = False
        for i in range(n):
            sign = 1.0 - 2.0 * x[i]
            delta = sign * (diag[i] + 2.0 * field[i])
            if delta < -1e-12:
                x[i] = 1.0 - x[i]
                for j in range(n):
                    field[j] += sign * qoff[j, i]
                improved = True
    return x, accepted


def anneal_schedule(q: QuboInstance, sweeps: int) -> np.ndarray:
    """Inverse temperatures: geometric cooling from max|q_ij|*n to 1e-3 of that."""
    Q = q.q
    off = np.abs(Q - np.diag(np.diag(Q)))
    scale = off.max() if q.n > 1 else 0.0
    if scale == 0.0:
        scale = max(float(np.abs(Q).max()), 1.0)
    t0 = scale * q.n
    temps = t0 * np.power(1e-3, np.arange(sweeps) / max(sweeps - 1, 1))
    return 1.0 / temps


def solve_anneal(q: QuboInstance, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Best state over ``cfg.restarts`` independent annealing chains.

    Restart ``r`` draws its start state and acceptance uniforms from a PCG64
    stream seeded with ``(cfg.seed, r)``, so results are reproducible and do not
    depend on the order in which chains run. The all-zeros state is always a
    candidate, hence the returned energy never exceeds 0 for cut QUBOs.
    """
    Q = q.q
    diag = np.ascontiguousarray(np.diag(Q))
    qoff = np.ascontiguousarray(Q - np.diag(diag))
    betas = anneal_schedule(q, cfg.sweeps)
    best_bits = np.zeros(q.n)
    best_e = 0.0
    best_restart = -1
    accepted_total = 0
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        x0 = rng.integers(0, 2, size=q.n).astype(np.float64)
        uniforms = rng.random((cfg.sweeps, q.n))
        x, accepted = _anneal_chain(qoff, diag, x0, betas, uniforms)
        accepted_total += int(accepted)
        e = float(x @ Q @ x)
        if e < best_e - 1e-12:
            best_e, best_bits, best_restart = e, x.copy(), r
    bits = tuple(int(b) for b in best_bits)
    return SolveResult(
        bits=bits,
        energy=q.energy(bits),
        solver_name="anneal",
        diagnostics={
            "sweeps": cfg.sweeps,
            "restarts": cfg.restarts,
            "seed": int(cfg.seed),
            "best_restart": best_restart,
            "accepted_flips": accepted_total,
            "evaluated_states": cfg.sweeps * cfg.restarts * q.n,
        },
    )


# -- dispatch -----------------------------------------------------------------

ExternalSolver = Callable[[QuboInstance, SolverConfig], SolveResult]
_REGISTRY: dict[str, ExternalSolver] = {}
BUILTIN_BACKENDS = ("exact", "anneal")


def register_solver(name: str, fn: ExternalSolver) -> None:
    """Make ``fn`` selectable as ``SolverConfig(backend=name)``."""
    if name in BUILTIN_BACKENDS:
        raise ConfigurationError(f"cannot replace built-in backend {name!r}")
    _REGISTRY[name] = fn


def unregister_solver(name: str) -> None:
    _REGISTRY.pop(name, None)


def available_backends() -> list[str]:
    return list(BUILTIN_BACKENDS) + sorted(_REGISTRY)


def solve(q: QuboInstance, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    if cfg.backend == "exact":
        if q.n <= cfg.threshold:
            return solve_exact(q, cfg.threshold)
        return solve_anneal(q, cfg)
    if cfg.backend == "anneal":
        return solve_anneal(q, cfg)
    fn = _REGISTRY.get(cfg.backend)
    if fn is None:
        raise ConfigurationError(
            f"unknown solver backend {cfg.backend!r}; available: {', '.join(available_backends())}"
        )
    res = fn(q, cfg)
    bits = tuple(int(b) for b in res.bits)
    if len(bits) != q.n or any(b not in (0, 1) for b in bits):
        raise NumericalError(f"solver {cfg.backend!r} returned a malformed bit vector")
    actual = q.energy(bits)
    if abs(actual - res.energy) > ENERGY_TOL:
        raise NumericalError(
            f"solver {cfg.backend!r} reported energy {res.energy!r} but its bits evaluate to {actual!r}"
        )
    return SolveResult(bits, actual, res.solver_name, dict(res.diagnostics))
