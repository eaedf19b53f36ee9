"""Price files -> log returns -> Pearson correlation graphs.

Price CSV layout::

    timestamp,AAA,BBB,...
    2025-01-02T09:30:00,101.2,55.0,...

Timestamps are ISO-8601 and must be strictly increasing. Empty cells are
missing values, handled by the alignment policy (``drop`` the whole row, or
``ffill`` from the previous row).
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources

import numpy as np

from signedcluster.errors import IngestionError, InvalidArgumentError
from signedcluster.graph import SignedGraph

log = logging.getLogger(__name__)

POLICIES = ("drop", "ffill")
# one NYSE session of hourly bars (09:30 .. 15:30)
DEFAULT_WINDOW = 7
ZERO_VARIANCE = 1e-24


@dataclass(frozen=True)
class PricePanel:
    timestamps: tuple[str, ...]
    prices: np.ndarray  # assets x time
    tickers: tuple[str, ...]

    def __post_init__(self):
        p = np.asarray(self.prices, dtype=np.float64)
        if p.ndim != 2 or p.shape != (len(self.tickers), len(self.timestamps)):
            raise InvalidArgumentError(
                f"prices shape {p.shape} does not match {len(self.tickers)} tickers x {len(self.timestamps)} timestamps"
            )
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            raise InvalidArgumentError("prices must be finite and strictly positive")
        parsed = [_parse_ts(t) for t in self.timestamps]
        if any(b <= a for a, b in zip(parsed, parsed[1:])):
            raise InvalidArgumentError("timestamps must be strictly increasing")
        p.setflags(write=False)
        object.__setattr__(self, "prices", p)

    @property
    def n_times(self) -> int:
        return len(self.timestamps)

    def window(self, start: int, stop: int) -> "PricePanel":
        return PricePanel(self.timestamps[start:stop], self.prices[:, start:stop], self.tickers)

    def select(self, rows) -> "PricePanel":
        rows = list(rows)
        return PricePanel(self.timestamps, self.prices[rows], tuple(self.tickers[i] for i in rows))


@dataclass(frozen=True)
class ReturnsPanel:
    returns: np.ndarray  # assets x (time - 1)
    tickers: tuple[str, ...]
    timestamps: tuple[str, ...] = ()  # end timestamp of each return
    window: dict = field(default_factory=dict)

    @property
    def nonzero_variance(self) -> np.ndarray:
        if self.returns.shape[1] < 2:
            return np.zeros(len(self.tickers), dtype=bool)
        return np.var(self.returns, axis=1, ddof=1) > ZERO_VARIANCE


def _parse_ts(s: str) -> datetime:
    try:
        return datetime.fromisoformat(s.strip())
    except ValueError:
        raise IngestionError(f"unparseable timestamp {s!r}") from None


def load_prices(path: str | os.PathLike, policy: str = "drop") -> PricePanel:
    """Read a price CSV into an aligned panel.

    Raises:
        IngestionError: on malformed files, non-positive prices, or fewer than
            two usable rows after alignment.
    """
    if policy not in POLICIES:
        raise InvalidArgumentError(f"unknown alignment policy {policy!r}; expected one of {POLICIES}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise IngestionError(f"{path}: need a header and at least one data row")
    header = [c.strip() for c in rows[0]]
    tickers = header[1:]
    if not tickers:
        raise IngestionError(f"{path}: header has no ticker columns")
    if len(set(tickers)) != len(tickers):
        raise IngestionError(f"{path}: duplicate ticker columns")

    stamps: list[str] = []
    values = np.full((len(rows) - 1, len(tickers)), np.nan)
    for r, row in enumerate(rows[1:]):
        lineno = r + 2
        if len(row) != len(header):
            raise IngestionError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        ts = row[0].strip()
        _parse_ts(ts)
        stamps.append(ts)
        for c, cell in enumerate(row[1:]):
            cell = cell.strip()
            if not cell:
                continue
            try:
                v = float(cell)
            except ValueError:
                raise IngestionError(f"{path}:{lineno}: unparseable price {cell!r} for {tickers[c]}") from None
            if not np.isfinite(v) or v <= 0:
                raise IngestionError(f"{path}:{lineno} ({ts}): non-positive price {cell} for {tickers[c]}")
            values[r, c] = v

    if policy == "ffill":
        for r in range(1, values.shape[0]):
            gap = np.isnan(values[r])
            values[r, gap] = values[r - 1, gap]
    keep = ~np.isnan(values).any(axis=1)
    dropped = int((~keep).sum())
    if dropped:
        log.info("%s: dropped %d rows with missing prices", path, dropped)
    if keep.sum() < 2:
        raise IngestionError(f"{path}: fewer than 2 usable rows after alignment")
    try:
        return PricePanel(
            tuple(s for s, k in zip(stamps, keep) if k),
            values[keep].T.copy(),
            tuple(tickers),
        )
    except InvalidArgumentError as exc:
        raise IngestionError(f"{path}: {exc}") from None


def fixture_prices_path():
    """Bundled synthetic hourly panel: 12 tickers in three sectors, 5 sessions."""
    return resources.files("signedcluster") / "data" / "fixture_prices.csv"


def log_returns(p: PricePanel) -> ReturnsPanel:
    if p.n_times < 2:
        raise InvalidArgumentError("need at least two timestamps for returns")
    r = np.diff(np.log(p.prices), axis=1)
    r.setflags(write=False)
    return ReturnsPanel(r, p.tickers, p.timestamps[1:], {"start": p.timestamps[0], "end": p.timestamps[-1]})


def pearson_matrix(r: ReturnsPanel) -> SignedGraph:
    """Signed graph of pairwise sample correlations of the return rows.

    Raises:
        InvalidArgumentError: if an asset has (numerically) zero variance;
            its correlation is undefined and is not silently zeroed.
    """
    x = np.asarray(r.returns, dtype=np.float64)
    if x.shape[1] < 2:
        raise InvalidArgumentError("need at least two return observations")
    xc = x - x.mean(axis=1, keepdims=True)
    cov = xc @ xc.T / (x.shape[1] - 1)
    var = np.diag(cov).copy()
    flat = np.flatnonzero(var <= ZERO_VARIANCE)
    if flat.size:
        names = ", ".join(r.tickers[i] for i in flat)
        raise InvalidArgumentError(f"zero-variance returns for {names}; correlation undefined")
    sd = np.sqrt(var)
    rho = np.clip(cov / np.outer(sd, sd), -1.0, 1.0)
    rho = (rho + rho.T) / 2
    np.fill_diagonal(rho, 0.0)
    return SignedGraph(rho, r.tickers)


@dataclass(frozen=True)
class WindowGraph:
    window_id: str
    graph: SignedGraph | None
    dropped: tuple[str, ...] = ()


def rolling_graphs(p: PricePanel, window: int = DEFAULT_WINDOW, step: int | None = None) -> list[WindowGraph]:
    """One correlation graph per complete window of ``window`` price rows.

    Windows start every ``step`` rows (default: ``window``, i.e. disjoint).
    Assets with zero return variance inside a window are dropped from that
    window's graph and listed in ``dropped``.
    """
    step = window if step is None else step
    if window < 3:
        # window rows give window-1 returns; correlation needs two
        raise InvalidArgumentError(f"window must cover at least 3 price rows, got {window}")
    if step < 1:
        raise InvalidArgumentError(f"step must be >= 1, got {step}")
    if window > p.n_times:
        raise InvalidArgumentError(f"window of {window} rows is longer than the panel ({p.n_times} rows)")
    out = []
    for start in range(0, p.n_times - window + 1, step):
        rets = log_returns(p.window(start, start + window))
        ok = rets.nonzero_variance
        dropped = tuple(t for t, good in zip(p.tickers, ok) if not good)
        wid = p.timestamps[start]
        if dropped:
            log.warning("window %s: dropping zero-variance assets %s", wid, ", ".join(dropped))
        if not ok.any():
            out.append(WindowGraph(wid, None, dropped))
            continue
        keep = np.flatnonzero(ok)
        sub = ReturnsPanel(rets.returns[keep], tuple(p.tickers[i] for i in keep), rets.timestamps, rets.window)
        out.append(WindowGraph(wid, pearson_matrix(sub), dropped))
    return out
