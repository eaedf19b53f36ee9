"""Command-line entry point.

Subcommands::

    synth      generate planted-partition graphs (single instance or grid)
    cluster    cluster one graph file with gcsq or pam
    bench      synthetic grid: generate, cluster, score -> long-format CSV
    finance    price file -> rolling correlation graphs -> per-window penalties
    score      ARI / penalty of a partition file
    summarize  mean / variance of a bench CSV per (n, k, algorithm)
    rerun      repeat a run from its manifest.json

Every command that writes files also writes ``manifest.json`` holding the
resolved configuration, input hashes and timings; ``rerun`` replays it.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from signedcluster import __version__
from signedcluster.baseline import baseline_cluster
from signedcluster.errors import (
    ConfigurationError,
    InvalidArgumentError,
    SignedClusterError,
)
from signedcluster.finance import DEFAULT_WINDOW, POLICIES, load_prices, rolling_graphs
from signedcluster.gcsq import gcsq_cluster
from signedcluster.graph import (
    SignedGraph,
    intra_weight,
    read_graph_csv,
    read_partition_json,
    write_graph_csv,
    write_partition_json,
)
from signedcluster.metrics import ari, penalty
from signedcluster.qubo import SolverConfig
from signedcluster.synthgen import SynthSpec, generate

log = logging.getLogger("signedcluster")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
ALGORITHMS = ("gcsq", "pam")
BENCH_COLUMNS = ["n", "k", "seed", "algorithm", "ari", "penalty", "k_found", "runtime_ms"]

DEFAULTS = {
    "seed": 0,
    "solver": "exact",
    "threshold": 24,
    "sweeps": 2000,
    "restarts": 8,
    "workers": 1,
    "out": ".",
    "n": [10],
    "k": [2],
    "seeds": 1,
    "noise": 0.0,
    "concentration": 1.0,
    "algorithm": "gcsq",
    "algorithms": list(ALGORITHMS),
    "alpha": 2.0,
    "window": DEFAULT_WINDOW,
    "step": None,
    "policy": "drop",
}
LIST_KEYS = {"n": int, "k": int, "algorithms": str}
PATH_KEYS = ("graph", "partition", "truth", "prices", "bench_csv")


class UsageError(SignedClusterError):
    pass


# -- configuration ------------------------------------------------------------

def _coerce(key: str, raw: str):
    raw = raw.strip().strip('"').strip("'")
    if key in LIST_KEYS:
        return [LIST_KEYS[key](v) for v in raw.replace(",", " ").split()]
    default = DEFAULTS.get(key)
    if raw.lower() in ("none", "null", ""):
        return None
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int) or key in ("step", "k_given"):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; keys are flag names (dashes or underscores)."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _coerce(key, value)
    return out


def resolve(args: argparse.Namespace) -> dict:
    """flags > config file > built-in defaults."""
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("func", "config")}
    file_cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    cfg = {}
    for key in set(DEFAULTS) | set(flags):
        if key in flags:
            cfg[key] = flags[key]
        elif key in file_cfg:
            cfg[key] = file_cfg[key]
        else:
            cfg[key] = DEFAULTS.get(key)
    for key in PATH_KEYS:
        if cfg.get(key):
            cfg[key] = os.path.abspath(cfg[key])
    return cfg


def solver_config(cfg: dict) -> SolverConfig:
    return SolverConfig(
        backend=cfg["solver"],
        sweeps=int(cfg["sweeps"]),
        restarts=int(cfg["restarts"]),
        seed=int(cfg["seed"]),
        threshold=int(cfg["threshold"]),
    )


# -- helpers ------------------------------------------------------------------

def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _require_file(path) -> str:
    if not os.path.isfile(path):
        raise UsageError(f"input file not found: {path}")
    return os.path.abspath(path)


def _dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_rows(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for r in rows:
            wr.writerow([_fmt(r[c]) for c in columns])


def run_algorithm(g: SignedGraph, algorithm: str, cfg: dict, k: int | None = None) -> dict:
    if algorithm == "gcsq":
        run = gcsq_cluster(g, solver_config(cfg))
        return {"partition": run.partition, "objective": run.objective, "trace": run.trace_json()}
    if algorithm == "pam":
        res = baseline_cluster(g, alpha=float(cfg["alpha"]), k=k, seed=int(cfg["seed"]))
        return {"partition": res.partition, "objective": intra_weight(g, res.partition), "k_source": res.k_source}
    raise ConfigurationError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


# -- commands -----------------------------------------------------------------
# each returns (outputs, inputs, extra manifest fields)

def cmd_synth(cfg: dict, out: Path):
    specs = []
    for n in cfg["n"]:
        for k in cfg["k"]:
            for s in range(int(cfg["seeds"])):
                try:
                    specs.append(SynthSpec(n=n, k=k, noise=float(cfg["noise"]),
                                           concentration=float(cfg["concentration"]),
                                           seed=int(cfg["seed"]) + s))
                except InvalidArgumentError as exc:
                    raise UsageError(f"invalid synthetic spec: {exc}") from None
    outputs, instances = [], []
    single = len(specs) == 1
    for spec in specs:
        stem = "" if single else f"n{spec.n}_k{spec.k}_seed{spec.seed}."
        g, truth = generate(spec)
        gpath, tpath = out / f"{stem}graph.csv", out / f"{stem}truth.json"
        write_graph_csv(g, gpath)
        write_partition_json(truth, tpath)
        outputs += [gpath.name, tpath.name]
        instances.append({"spec": spec.to_json(), "graph": gpath.name, "truth": tpath.name})
    print(json.dumps({"instances": len(specs), "out": str(out)}))
    return outputs, [], {"instances": instances}


def cmd_cluster(cfg: dict, out: Path):
    path = _require_file(cfg["graph"])
    g = read_graph_csv(path)
    algo = cfg["algorithm"]
    res = run_algorithm(g, algo, cfg, k=cfg.get("k_given"))
    p = res["partition"]
    write_partition_json(p, out / "partition.json")
    outputs = ["partition.json"]
    if "trace" in res:
        _dump_json(res["trace"], out / "trace.json")
        outputs.append("trace.json")
    summary = {"algorithm": algo, "k": p.k, "objective": res["objective"], "penalty": penalty(g, p)}
    _dump_json(summary, out / "summary.json")
    outputs.append("summary.json")
    print(json.dumps(summary))
    return outputs, [path], {}


def _bench_cell(task):
    n, k, seed, algorithms, cfg = task
    rows, failures = [], []
    try:
        spec = SynthSpec(n=n, k=k, noise=float(cfg["noise"]), concentration=float(cfg["concentration"]), seed=seed)
        g, truth = generate(spec)
    except SignedClusterError as exc:
        return rows, [{"n": n, "k": k, "seed": seed, "algorithm": a, "error": str(exc)} for a in algorithms]
    for algo in algorithms:
        t0 = time.perf_counter()
        try:
            res = run_algorithm(g, algo, cfg)
        except SignedClusterError as exc:
            failures.append({"n": n, "k": k, "seed": seed, "algorithm": algo, "error": str(exc)})
            continue
        ms = (time.perf_counter() - t0) * 1e3
        p = res["partition"]
        rows.append({
            "n": n, "k": k, "seed": seed, "algorithm": algo,
            "ari": ari(truth, p), "penalty": penalty(g, p), "k_found": p.k,
            "runtime_ms": f"{ms:.3f}",
        })
    return rows, failures


def cmd_bench(cfg: dict, out: Path):
    algorithms = list(cfg["algorithms"])
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}; expected some of {ALGORITHMS}")
    solver_config(cfg)  # validate before fanning out
    tasks = [(n, k, int(cfg["seed"]) + s, algorithms, cfg)
             for n in cfg["n"] for k in cfg["k"] for s in range(int(cfg["seeds"]))]
    workers = int(cfg["workers"])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_bench_cell, tasks))
    else:
        results = [_bench_cell(t) for t in tasks]
    rows = [r for rs, _ in results for r in rs]
    failures = [f for _, fs in results for f in fs]
    rows.sort(key=lambda r: (r["n"], r["k"], r["seed"], r["algorithm"]))
    _write_rows(out / "bench.csv", BENCH_COLUMNS, rows)
    print(json.dumps({"rows": len(rows), "failures": len(failures), "out": str(out / "bench.csv")}))
    return ["bench.csv"], [], {"failures": failures, "grid_cells": len(tasks)}


def cmd_finance(cfg: dict, out: Path):
    path = _require_file(cfg["prices"])
    if cfg["policy"] not in POLICIES:
        raise UsageError(f"unknown policy {cfg['policy']!r}")
    algorithms = list(cfg["algorithms"])
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}; expected some of {ALGORITHMS}")
    panel = load_prices(path, cfg["policy"])
    try:
        windows = rolling_graphs(panel, int(cfg["window"]), cfg["step"])
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from None
    gdir = out / "graphs"
    gdir.mkdir(exist_ok=True)
    rows, failures, outputs, dropped = [], [], [], {}
    for w in windows:
        if w.dropped:
            dropped[w.window_id] = list(w.dropped)
        if w.graph is None:
            failures.append({"window": w.window_id, "error": "no asset with non-zero variance"})
            continue
        gname = f"graphs/{w.window_id.replace(':', '-')}.csv"
        write_graph_csv(w.graph, out / gname)
        outputs.append(gname)
        for algo in algorithms:
            try:
                res = run_algorithm(w.graph, algo, cfg)
            except SignedClusterError as exc:
                failures.append({"window": w.window_id, "algorithm": algo, "error": str(exc)})
                continue
            p = res["partition"]
            rows.append({"window": w.window_id, "algorithm": algo, "penalty": penalty(w.graph, p), "k_found": p.k})
    _write_rows(out / "penalties.csv", ["window", "algorithm", "penalty", "k_found"], rows)
    print(json.dumps({"windows": len(windows), "rows": len(rows), "failures": len(failures)}))
    return ["penalties.csv"] + outputs, [path], {"failures": failures, "dropped_assets": dropped}


def cmd_score(cfg: dict, out: Path | None):
    gpath = _require_file(cfg["graph"])
    ppath = _require_file(cfg["partition"])
    g = read_graph_csv(gpath)
    p = read_partition_json(ppath)
    inputs = [gpath, ppath]
    if p.n != g.n:
        raise UsageError(f"partition covers {p.n} vertices but graph has {g.n}")
    result = {"ari": None, "penalty": penalty(g, p), "k": p.k}
    if cfg.get("truth"):
        tpath = _require_file(cfg["truth"])
        truth = read_partition_json(tpath)
        inputs.append(tpath)
        if truth.n != p.n:
            raise UsageError(f"truth covers {truth.n} vertices but partition has {p.n}")
        result["ari"] = ari(truth, p) if p.n >= 2 else 1.0
    print(json.dumps(result))
    outputs = []
    if out is not None:
        _dump_json(result, out / "score.json")
        outputs.append("score.json")
    return outputs, inputs, {}


def summarize_rows(rows: list[dict]) -> list[dict]:
    """Mean and population variance of ari / penalty / k_found per (n, k, algorithm)."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((int(r["n"]), int(r["k"]), r["algorithm"]), []).append(r)
    out = []
    for (n, k, algo), rs in sorted(groups.items()):
        rec = {"n": n, "k": k, "algorithm": algo, "count": len(rs)}
        for col in ("ari", "penalty", "k_found"):
            v = np.array([float(r[col]) for r in rs])
            rec[f"{col}_mean"] = float(v.mean())
            rec[f"{col}_var"] = float(v.var())
        out.append(rec)
    return out


def cmd_summarize(cfg: dict, out: Path | None):
    path = _require_file(cfg["bench_csv"])
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    summary = summarize_rows(rows)
    cols = ["n", "k", "algorithm", "count"] + [f"{c}_{s}" for c in ("ari", "penalty", "k_found") for s in ("mean", "var")]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(cols)
    for r in summary:
        wr.writerow([_fmt(r[c]) for c in cols])
    sys.stdout.write(buf.getvalue())
    outputs = []
    if out is not None:
        (out / "summary.csv").write_text(buf.getvalue())
        outputs.append("summary.csv")
    return outputs, [path], {}


COMMANDS = {
    "synth": cmd_synth,
    "cluster": cmd_cluster,
    "bench": cmd_bench,
    "finance": cmd_finance,
    "score": cmd_score,
    "summarize": cmd_summarize,
}
# commands that only write files when --out is given explicitly
OPTIONAL_OUT = {"score", "summarize"}


def execute(command: str, cfg: dict, explicit_out: bool = True) -> int:
    out = None
    if command not in OPTIONAL_OUT or explicit_out:
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    outputs, inputs, extra = COMMANDS[command](cfg, out)
    if out is not None:
        manifest = {
            "command": command,
            "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
            "seeds": {"base": cfg["seed"], "count": cfg.get("seeds")},
            "inputs": {p: sha256(p) for p in inputs},
            "outputs": sorted(outputs),
            "version": __version__,
            "numpy": np.__version__,
            "timings": {"total_s": time.perf_counter() - t0},
            **extra,
        }
        _dump_json(manifest, out / "manifest.json")
    return EXIT_OK


def cmd_rerun(args) -> int:
    path = _require_file(args.manifest)
    with open(path) as fh:
        manifest = json.load(fh)
    command = manifest.get("command")
    if command not in COMMANDS:
        raise UsageError(f"{path}: manifest names unknown command {command!r}")
    cfg = dict(manifest["config"])
    cfg["out"] = args.out if args.out else str(Path(path).parent)
    for ipath, digest in manifest.get("inputs", {}).items():
        if not os.path.isfile(ipath):
            raise UsageError(f"input recorded in manifest is missing: {ipath}")
        if sha256(ipath) != digest:
            raise SignedClusterError(f"input {ipath} changed since the manifest was written")
    return execute(command, cfg)


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    g.add_argument("--solver", help="QUBO backend: exact (enumerate up to --threshold) or anneal")
    g.add_argument("--threshold", type=int, help="largest QUBO solved exhaustively (default 24, max 30)")
    g.add_argument("--sweeps", type=int, help="annealing sweeps per restart (default 2000)")
    g.add_argument("--restarts", type=int, help="annealing restarts (default 8)")
    g.add_argument("--workers", type=int, help="parallel worker processes for bench (default 1)")
    g.add_argument("--config", help="flat key = value config file")
    g.add_argument("--out", help="output directory (default .)")
    g.add_argument("-v", "--verbose", action="store_true", default=None)

    p = argparse.ArgumentParser(prog="signedcluster", description=__doc__.split("\n\n")[0],
                                parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="generate planted-partition graphs")
    s.add_argument("--n", type=int, nargs="+", help="vertex count(s)")
    s.add_argument("--k", type=int, nargs="+", help="planted cluster count(s)")
    s.add_argument("--seeds", type=int, help="seeds per (n, k) cell, counted up from --seed")
    s.add_argument("--noise", type=float, help="probability of resampling an edge from the opposite range")
    s.add_argument("--concentration", type=float, help="symmetric Dirichlet concentration (default 1)")

    c = sub.add_parser("cluster", parents=[common], help="cluster one graph CSV")
    c.add_argument("graph")
    c.add_argument("--algorithm", choices=ALGORITHMS)
    c.add_argument("--k", dest="k_given", type=int, help="fixed k for pam (default: eigengap estimate)")
    c.add_argument("--alpha", type=float, help="distance transform parameter for pam (default 2)")

    b = sub.add_parser("bench", parents=[common], help="synthetic benchmark grid")
    b.add_argument("--n", type=int, nargs="+")
    b.add_argument("--k", type=int, nargs="+")
    b.add_argument("--seeds", type=int)
    b.add_argument("--noise", type=float)
    b.add_argument("--concentration", type=float)
    b.add_argument("--algorithms", nargs="+")
    b.add_argument("--alpha", type=float)

    f = sub.add_parser("finance", parents=[common], help="rolling correlation graphs from a price CSV")
    f.add_argument("prices")
    f.add_argument("--window", type=int, help=f"price rows per window (default {DEFAULT_WINDOW})")
    f.add_argument("--step", type=int, help="rows between window starts (default: window)")
    f.add_argument("--policy", choices=POLICIES, help="missing-value handling (default drop)")
    f.add_argument("--algorithms", nargs="+")
    f.add_argument("--alpha", type=float)

    sc = sub.add_parser("score", parents=[common], help="score a partition")
    sc.add_argument("graph")
    sc.add_argument("partition")
    sc.add_argument("--truth")

    sm = sub.add_parser("summarize", parents=[common], help="aggregate a bench CSV")
    sm.add_argument("bench_csv")

    r = sub.add_parser("rerun", help="repeat a run from its manifest")
    r.add_argument("manifest")
    r.add_argument("--out")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    command = args.command
    try:
        if command == "rerun":
            return cmd_rerun(args)
        explicit_out = args.out is not None
        ns = argparse.Namespace(**{k: v for k, v in vars(args).items() if k not in ("command", "verbose")})
        cfg = resolve(ns)
        return execute(command, cfg, explicit_out)
    except (UsageError, InvalidArgumentError, ConfigurationError, FileNotFoundError) as exc:
        print(f"signedcluster {command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SignedClusterError, OSError) as exc:
        print(f"signedcluster {command}: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
