"""Access to the bundled benchmark index CSVs.

Three synthetic daily index series ship with the package (S&P 500, Dow
Jones, Nasdaq analogues, 1992-2024).  They are statistically calibrated
stand-ins for the real indexes: heavy tails, volatility clustering, and the
documented long-memory structure, at the same observation counts.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .series import PriceSeries, load_prices

__all__ = ["BUNDLED", "bundled_path", "load_bundled"]

BUNDLED = {
    "sp500": "S&P 500",
    "djia": "Dow Jones",
    "nasdaq": "Nasdaq",
}


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled dataset {name!r}; choose from {sorted(BUNDLED)}")
    with resources.as_file(resources.files("lrdlab.data") / f"{name}.csv") as p:
        return Path(p)


def load_bundled(name: str) -> PriceSeries:
    return load_prices(bundled_path(name), label=BUNDLED[name])
