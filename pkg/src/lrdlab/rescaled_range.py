"""Rescaled-range (R/S) analysis.

Each block of length n contributes R_k / S_k, where R_k is the range of the
cumulative deviations from the block mean and S_k the population standard
deviation of the block.  The per-scale statistic averages the surviving
block ratios; the Hurst exponent is the slope of ln(R/S)_n on ln n.
"""

from __future__ import annotations

import warnings

import numpy as np

from .scalefit import HurstEstimate, HurstMethod, ScaleFit, fit_loglog, infer_hurst, make_schedule
from .series import ReturnSeries

__all__ = ["rs_statistic", "rs_analysis"]


def _values(r) -> np.ndarray:
    if isinstance(r, ReturnSeries):
        return r.values
    return np.asarray(r, dtype=float)


def rs_statistic(block) -> float:
    """R/S of one block: range of cumulative mean-deviations over population std."""
    x = _values(block)
    if x.size < 2:
        raise ValueError("block must have at least 2 points")
    dev = x - x.mean()
    s = float(np.sqrt(np.mean(dev**2)))
    if s == 0.0:
        raise ValueError("constant block has zero standard deviation")
    y = np.cumsum(dev)
    r = float(y.max() - y.min())
    return r / s


def _rs_at_scale(x: np.ndarray, n: int) -> float | None:
    """Mean R/S over the floor(N/n) complete blocks; None if all are constant."""
    k = x.size // n
    blocks = x[: k * n].reshape(k, n)
    dev = blocks - blocks.mean(axis=1, keepdims=True)
    s = np.sqrt(np.mean(dev**2, axis=1))
    y = np.cumsum(dev, axis=1)
    r = y.max(axis=1) - y.min(axis=1)
    ok = s > 0.0
    if not np.any(ok):
        return None
    return float(np.mean(r[ok] / s[ok]))


def rs_analysis(r) -> tuple[HurstEstimate, ScaleFit]:
    """Full R/S battery: schedule, per-scale averages, log-log fit, inference.

    A scale where every block is constant is dropped with a warning; the
    partial tail block at each scale is discarded, never wrapped.
    """
    x = _values(r)
    if x.size < 16:
        raise ValueError(f"series too short for R/S analysis: {x.size} < 16")
    points = []
    for n in make_schedule(x.size):
        rs = _rs_at_scale(x, n)
        if rs is None:
            warnings.warn(f"all blocks constant at scale {n}; scale dropped", stacklevel=2)
            continue
        points.append((np.log(n), np.log(rs)))
    if len(points) < 3:
        raise ValueError("fewer than 3 usable scales; series is degenerate")
    fit = fit_loglog(points)
    return infer_hurst(fit, HurstMethod.RS), fit
