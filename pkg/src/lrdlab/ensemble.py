"""Generator-output evaluation: nearest-path selection and the LRD battery.

An ensemble is a set of equal-length synthetic log-price paths.  Evaluation
anchors each path at the empirical initial price, selects the path with the
smallest Euclidean distance to the empirical price series, and runs the full
battery (moment diagnostics, R/S, DFA, ARFIMA-FIGARCH fit) on that path's
returns, plus a quantitative tail-mass comparison of the return
distributions.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import arfima_figarch
from .dfa import dfa_analysis
from .diagnostics import MomentReport, moments
from .rescaled_range import rs_analysis
from .series import Frequency, PriceSeries, ReturnSeries

__all__ = [
    "PathEnsemble",
    "EvaluationReport",
    "load_ensemble",
    "save_ensemble",
    "select_nearest",
    "evaluate",
    "canonical_json",
]

_MAGIC = b"LMP1"
_MIN_LENGTH = 16
_CHUNK = 256  # paths per block in the distance scan (bounds peak memory)


class EnsembleFormatError(ValueError):
    """Malformed ensemble file."""


@dataclass(frozen=True)
class PathEnsemble:
    """Equal-length synthetic log-price paths plus provenance tags."""

    paths: np.ndarray
    frequency: Frequency = Frequency.DAILY
    generator_label: str = ""

    def __post_init__(self):
        arr = np.asarray(self.paths, dtype=float)
        if arr.ndim != 2:
            raise EnsembleFormatError("paths must form a 2-D array")
        if arr.shape[1] < _MIN_LENGTH:
            raise EnsembleFormatError(
                f"paths must have at least {_MIN_LENGTH} points, got {arr.shape[1]}"
            )
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise EnsembleFormatError(
                f"non-finite value at path {bad[0]}, position {bad[1]}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "paths", arr)

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    @property
    def length(self) -> int:
        return self.paths.shape[1]


def load_ensemble(path) -> PathEnsemble:
    """Read an ensemble file; CSV or binary is selected by extension.

    CSV: one path per row, comma-separated log-prices, optional header
    ``# generator=<label> frequency=<f>``.  Binary: magic ``LMP1``,
    little-endian u32 path count and length, then row-major float64.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _load_csv(path)
    return _load_binary(path)


def _parse_header(line: str) -> tuple[str, Frequency]:
    label, freq = "", Frequency.DAILY
    for token in line.lstrip("#").split():
        if token.startswith("generator="):
            label = token.split("=", 1)[1]
        elif token.startswith("frequency="):
            freq = Frequency(token.split("=", 1)[1])
    return label, freq


def _load_csv(path: Path) -> PathEnsemble:
    label, freq = "", Frequency.DAILY
    rows: list[np.ndarray] = []
    width = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                label, freq = _parse_header(line)
                continue
            try:
                row = np.array([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise EnsembleFormatError(f"{path.name} line {lineno}: {exc}") from None
            if width is None:
                width = row.size
            elif row.size != width:
                raise EnsembleFormatError(
                    f"{path.name} line {lineno}: ragged row "
                    f"({row.size} values, expected {width})"
                )
            if not np.all(np.isfinite(row)):
                col = int(np.argmin(np.isfinite(row)))
                raise EnsembleFormatError(
                    f"{path.name} line {lineno}: non-finite value in column {col}"
                )
            rows.append(row)
    if not rows:
        raise EnsembleFormatError(f"{path.name}: no paths")
    return PathEnsemble(paths=np.vstack(rows), frequency=freq, generator_label=label)


def _load_binary(path: Path) -> PathEnsemble:
    raw = path.read_bytes()
    if raw[:4] != _MAGIC:
        raise EnsembleFormatError(f"{path.name}: bad magic {raw[:4]!r}, expected {_MAGIC!r}")
    n_paths, length = struct.unpack("<II", raw[4:12])
    expected = 12 + 8 * n_paths * length
    if len(raw) != expected:
        raise EnsembleFormatError(
            f"{path.name}: payload is {len(raw)} bytes, header implies {expected}"
        )
    arr = np.frombuffer(raw, dtype="<f8", offset=12).reshape(n_paths, length)
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise EnsembleFormatError(
            f"{path.name}: non-finite value at path {bad[0]}, position {bad[1]}"
        )
    return PathEnsemble(paths=arr.copy())


def save_ensemble(ensemble: PathEnsemble, path) -> Path:
    """Write an ensemble in the format implied by the file extension."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", encoding="utf-8") as fh:
            fh.write(
                f"# generator={ensemble.generator_label or 'unknown'} "
                f"frequency={ensemble.frequency.value}\n"
            )
            for row in ensemble.paths:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    else:
        with path.open("wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<II", ensemble.n_paths, ensemble.length))
            fh.write(np.ascontiguousarray(ensemble.paths, dtype="<f8").tobytes())
    return path


def select_nearest(ensemble: PathEnsemble, empirical: PriceSeries) -> tuple[int, float]:
    """Index and distance of the path closest to the empirical price series.

    Paths are exponentiated and anchored at the empirical initial price
    before the Euclidean distance is taken; ties break to the lowest index.
    """
    real = empirical.closes
    if ensemble.length != real.size:
        raise ValueError(
            f"path length {ensemble.length} != empirical length {real.size}"
        )
    p0 = real[0]
    best_idx, best_d2 = 0, np.inf
    for lo in range(0, ensemble.n_paths, _CHUNK):
        block = ensemble.paths[lo : lo + _CHUNK]
        fake = p0 * np.exp(block - block[:, :1])
        d2 = np.sum((real[None, :] - fake) ** 2, axis=1)
        i = int(np.argmin(d2))
        if d2[i] < best_d2:
            best_idx, best_d2 = lo + i, float(d2[i])
    return best_idx, float(np.sqrt(best_d2))


def _tail_masses(real: np.ndarray, fake: np.ndarray) -> dict:
    """Fractions beyond the empirical 1st/99th return percentiles."""
    lo, hi = np.percentile(real, [1.0, 99.0])
    return {
        "lower_threshold": float(lo),
        "upper_threshold": float(hi),
        "real_lower": float(np.mean(real < lo)),
        "real_upper": float(np.mean(real > hi)),
        "synthetic_lower": float(np.mean(fake < lo)),
        "synthetic_upper": float(np.mean(fake > hi)),
    }


@dataclass(frozen=True)
class EvaluationReport:
    """Battery results for the nearest synthetic path; sections that failed
    carry their error message in ``errors`` instead of aborting the report."""

    selected_index: int
    euclidean_distance: float
    rs: dict | None
    dfa: dict | None
    arfima_figarch: dict | None
    distribution: dict | None
    aggregate_dfa: dict | None
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "selected_index": self.selected_index,
            "euclidean_distance": self.euclidean_distance,
            "rs": self.rs,
            "dfa": self.dfa,
            "arfima_figarch": self.arfima_figarch,
            "distribution": self.distribution,
            "aggregate_dfa": self.aggregate_dfa,
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, compact separators.

    parse -> serialize of this form is byte-identical, which makes report
    files safe to diff and hash.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _aggregate_dfa(ensemble: PathEnsemble, subsample: int) -> dict:
    take = min(subsample, ensemble.n_paths)
    idx = np.unique(np.linspace(0, ensemble.n_paths - 1, take).astype(int))
    hs = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i in idx:
            returns = np.diff(ensemble.paths[i])
            try:
                est, _ = dfa_analysis(returns)
                hs.append(est.h)
            except ValueError:
                continue
    if not hs:
        return {"n_paths": 0}
    hs_arr = np.array(hs)
    qs = np.percentile(hs_arr, [5, 25, 50, 75, 95])
    return {
        "n_paths": int(hs_arr.size),
        "mean_h": float(hs_arr.mean()),
        "quantiles": {str(q): float(v) for q, v in zip((5, 25, 50, 75, 95), qs)},
    }


def evaluate(
    ensemble: PathEnsemble,
    empirical: PriceSeries,
    truncation: int = arfima_figarch.DEFAULT_TRUNCATION,
    aggregate_subsample: int = 200,
) -> EvaluationReport:
    """Select the nearest path and run the full battery on it.

    Sub-analyses are independent: a failure in one section is recorded
    under ``errors`` and the rest of the report is still produced.
    """
    idx, dist = select_nearest(ensemble, empirical)
    fake_returns = np.diff(ensemble.paths[idx])
    real_returns = np.diff(np.log(empirical.closes))

    sections: dict[str, dict | None] = {
        "rs": None, "dfa": None, "arfima_figarch": None, "distribution": None,
    }
    errors: dict[str, str] = {}

    try:
        est, fit_ln = rs_analysis(fake_returns)
        sections["rs"] = {"estimate": est.to_dict(), "points": fit_ln.plot_rows()}
    except ValueError as exc:
        errors["rs"] = str(exc)
    try:
        est, fit_ln = dfa_analysis(fake_returns)
        sections["dfa"] = {"estimate": est.to_dict(), "points": fit_ln.plot_rows()}
    except ValueError as exc:
        errors["dfa"] = str(exc)
    try:
        sections["arfima_figarch"] = arfima_figarch.fit(
            fake_returns, truncation=truncation
        ).to_dict()
    except ValueError as exc:
        errors["arfima_figarch"] = str(exc)
    try:
        sections["distribution"] = {
            "real": moments(real_returns).to_dict(),
            "synthetic": moments(fake_returns).to_dict(),
            "tail_mass": _tail_masses(real_returns, fake_returns),
        }
    except ValueError as exc:
        errors["distribution"] = str(exc)

    return EvaluationReport(
        selected_index=idx,
        euclidean_distance=dist,
        rs=sections["rs"],
        dfa=sections["dfa"],
        arfima_figarch=sections["arfima_figarch"],
        distribution=sections["distribution"],
        aggregate_dfa=_aggregate_dfa(ensemble, aggregate_subsample),
        errors=errors,
    )
