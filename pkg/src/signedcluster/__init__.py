"""Recursive min-cut clustering of signed correlation graphs (GCS-Q) with QUBO backends."""

from signedcluster.errors import (
    CapacityError,
    ConfigurationError,
    IngestionError,
    InvalidArgumentError,
    NumericalError,
    SignedClusterError,
)
from signedcluster.graph import (
    Cut,
    Partition,
    SignedGraph,
    cut_value,
    induced_subgraph,
    intra_weight,
    total_edge_weight,
)
from signedcluster.qubo import (
    QuboInstance,
    SolveResult,
    SolverConfig,
    build_mincut_qubo,
    register_solver,
    solve,
    solve_anneal,
    solve_exact,
)
from signedcluster.gcsq import GcsqRun, SplitRecord, exhaustive_best_partition, gcsq_cluster
from signedcluster.metrics import ari, contingency_table, penalty
from signedcluster.synthgen import SynthSpec, allocate_sizes, generate

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigurationError",
    "Cut",
    "GcsqRun",
    "IngestionError",
    "InvalidArgumentError",
    "NumericalError",
    "Partition",
    "QuboInstance",
    "SignedClusterError",
    "SignedGraph",
    "SolveResult",
    "SolverConfig",
    "SplitRecord",
    "SynthSpec",
    "allocate_sizes",
    "ari",
    "build_mincut_qubo",
    "contingency_table",
    "cut_value",
    "exhaustive_best_partition",
    "gcsq_cluster",
    "generate",
    "induced_subgraph",
    "intra_weight",
    "penalty",
    "register_solver",
    "solve",
    "solve_anneal",
    "solve_exact",
    "total_edge_weight",
]
