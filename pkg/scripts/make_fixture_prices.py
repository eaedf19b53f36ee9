"""Regenerate src/signedcluster/data/fixture_prices.csv.

Twelve synthetic tickers in three sectors driven by sector factors (the third
sector loads negatively on the first), hourly bars 09:30-15:30 over the first
five business days of January 2025.
"""

import csv
from datetime import date, datetime, time
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "signedcluster" / "data" / "fixture_prices.csv"
DAYS = [date(2025, 1, d) for d in (2, 3, 6, 7, 8)]
HOURS = [time(9 + h, 30) for h in range(7)]
SECTORS = {"TEC": 4, "ENE": 4, "UTL": 4}


def main(seed=20250102):
    rng = np.random.default_rng(seed)
    stamps = [datetime.combine(d, t).isoformat() for d in DAYS for t in HOURS]
    T = len(stamps)
    f = rng.normal(0, 0.004, size=(2, T - 1))
    loadings = {"TEC": (1.0, 0.0), "ENE": (0.0, 1.0), "UTL": (-0.8, 0.2)}
    tickers, rets = [], []
    for sector, count in SECTORS.items():
        a, b = loadings[sector]
        for i in range(count):
            tickers.append(f"{sector}{i + 1}")
            rets.append(a * f[0] + b * f[1] + rng.normal(0, 0.0015, T - 1))
    start = rng.uniform(20, 200, size=len(tickers))
    prices = start[:, None] * np.exp(np.hstack([np.zeros((len(tickers), 1)), np.cumsum(rets, axis=1)]))
    with open(OUT, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["timestamp", *tickers])
        for t, ts in enumerate(stamps):
            wr.writerow([ts, *(f"{p:.4f}" for p in prices[:, t])])


if __name__ == "__main__":
    main()
