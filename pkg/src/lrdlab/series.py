"""Price series ingestion, frequency downsampling, and log-return construction.

The CSV contract is deliberately small: UTF-8 text, a ``date,close`` header,
ISO-8601 dates, ``.`` decimal separator.  Downsampling keeps the last trading
day of each ISO week or calendar month; markets close, so missing days are
real gaps and are never interpolated.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

__all__ = [
    "Frequency",
    "PriceSeries",
    "ReturnSeries",
    "load_prices",
    "downsample",
    "log_returns",
]


class Frequency(str, Enum):
    DAILY = "daily"
    WEEKLY = "weekly"
    MONTHLY = "monthly"


class IngestError(ValueError):
    """Malformed price input (bad row, bad ordering, bad values)."""


def _as_float_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr = np.atleast_1d(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Timestamped closing values at a declared frequency.

    Dates must be strictly increasing and all closes positive.  The frequency
    tag is validated against the observed date spacing: weekly observations
    must be 5-12 calendar days apart, monthly observations must fall in
    distinct calendar months.
    """

    dates: tuple[date, ...]
    closes: np.ndarray
    frequency: Frequency = Frequency.DAILY
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "closes", _as_float_array(self.closes))
        if len(self.dates) != len(self.closes):
            raise IngestError(
                f"{len(self.dates)} dates but {len(self.closes)} closes"
            )
        if len(self.dates) == 0:
            raise IngestError("empty price series")
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise IngestError(
                    f"dates not strictly increasing at position {i}: "
                    f"{self.dates[i - 1]} then {self.dates[i]}"
                )
        if not np.all(np.isfinite(self.closes)) or np.any(self.closes <= 0):
            bad = int(np.argmin((self.closes > 0) & np.isfinite(self.closes)))
            raise IngestError(f"non-positive price at position {bad}")
        self._check_spacing()

    def _check_spacing(self):
        if self.frequency is Frequency.WEEKLY:
            # the final gap may be short: a sample can end on the first
            # trading day(s) of a new ISO week
            for i in range(1, len(self.dates)):
                gap = (self.dates[i] - self.dates[i - 1]).days
                last = i == len(self.dates) - 1
                if gap > 12 or (gap < 5 and not last):
                    raise IngestError(
                        f"weekly series has a {gap}-day gap at position {i}"
                    )
        elif self.frequency is Frequency.MONTHLY:
            months = [(d.year, d.month) for d in self.dates]
            if len(set(months)) != len(months):
                raise IngestError("monthly series repeats a calendar month")

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def observations(self):
        return tuple(zip(self.dates, self.closes))


@dataclass(frozen=True)
class ReturnSeries:
    """Log-returns derived from a :class:`PriceSeries` (length = source - 1)."""

    values: np.ndarray
    frequency: Frequency = Frequency.DAILY
    source_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_array(self.values))
        if not np.all(np.isfinite(self.values)):
            bad = int(np.argmin(np.isfinite(self.values)))
            raise IngestError(f"non-finite return at position {bad}")

    def __len__(self) -> int:
        return len(self.values)


def load_prices(path, label: str = "") -> PriceSeries:
    """Read a ``date,close`` CSV into a daily :class:`PriceSeries`.

    Rows are sorted by date if needed.  A headerless file whose first row
    already parses as data is accepted with a warning.  Malformed rows,
    non-positive closes, and duplicate dates raise :class:`IngestError`
    carrying the 1-based line number.
    """
    path = Path(path)
    rows: list[tuple[date, float]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1:
                head = [c.strip().lower() for c in row]
                if head[:2] == ["date", "close"]:
                    continue
                warnings.warn(
                    f"{path.name}: no 'date,close' header; "
                    "treating first row as data",
                    stacklevel=2,
                )
            if len(row) < 2:
                raise IngestError(f"{path.name} line {lineno}: expected 'date,close'")
            try:
                d = date.fromisoformat(row[0].strip())
                close = float(row[1])
            except ValueError as exc:
                raise IngestError(f"{path.name} line {lineno}: {exc}") from None
            if close <= 0:
                raise IngestError(
                    f"{path.name} line {lineno}: non-positive price {close}"
                )
            rows.append((d, close))

    if not rows:
        raise IngestError(f"{path.name}: no data rows")
    rows.sort(key=lambda r: r[0])
    for i in range(1, len(rows)):
        if rows[i][0] == rows[i - 1][0]:
            raise IngestError(f"{path.name}: duplicate date {rows[i][0]}")
    series = PriceSeries(
        dates=tuple(r[0] for r in rows),
        closes=np.array([r[1] for r in rows]),
        frequency=Frequency.DAILY,
        label=label or path.stem,
    )
    log.info("loaded %d rows from %s", len(series), path)
    return series


def downsample(p: PriceSeries, target: Frequency) -> PriceSeries:
    """Downsample a daily series to weekly (ISO week) or monthly closes.

    One observation per period, taken at the period's last trading day and
    dated at that day.  Never invents dates absent from the daily series.
    """
    if p.frequency is not Frequency.DAILY:
        raise ValueError(f"can only downsample a daily series, got {p.frequency.value}")
    if target is Frequency.DAILY:
        raise ValueError("downsampling to daily is an identity request; refusing")
    if target is Frequency.WEEKLY:
        def key(d: date):
            iso = d.isocalendar()
            return (iso[0], iso[1])
    else:
        def key(d: date):
            return (d.year, d.month)

    kept_idx: list[int] = []
    prev_key = None
    for i, d in enumerate(p.dates):
        k = key(d)
        if k == prev_key:
            kept_idx[-1] = i
        else:
            kept_idx.append(i)
            prev_key = k
    idx = np.array(kept_idx)
    return PriceSeries(
        dates=tuple(p.dates[i] for i in kept_idx),
        closes=p.closes[idx],
        frequency=target,
        label=p.label,
    )


def log_returns(p: PriceSeries) -> ReturnSeries:
    """r_t = ln(P_{t+1} / P_t); length is one less than the price series."""
    if len(p) < 2:
        raise ValueError("need at least 2 prices to form returns")
    values = np.diff(np.log(p.closes))
    return ReturnSeries(values=values, frequency=p.frequency, source_label=p.label)
