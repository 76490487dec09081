"""Detrended fluctuation analysis (order 1).

The series is integrated once into a mean-adjusted cumulative profile; each
block of the profile is detrended by its own least-squares line, and the
per-scale fluctuation F(n) is the simple average of the per-block residual
RMS values.  The Hurst exponent is the slope of ln F(n) on ln n.
"""

from __future__ import annotations

import warnings

import numpy as np

from .scalefit import HurstEstimate, HurstMethod, ScaleFit, fit_loglog, infer_hurst, make_schedule
from .series import ReturnSeries

__all__ = ["profile", "block_fluctuation", "dfa_analysis"]

_MIN_SCALE = 4  # linear detrending needs >= 2 residual dof


def _values(r) -> np.ndarray:
    if isinstance(r, ReturnSeries):
        return r.values
    return np.asarray(r, dtype=float)


def profile(r) -> np.ndarray:
    """Mean-adjusted cumulative profile Y(i) = sum_{t<=i} (X_t - mean)."""
    x = _values(r)
    if x.size < 2:
        raise ValueError("need at least 2 points to form a profile")
    return np.cumsum(x - x.mean())


def block_fluctuation(profile_segment) -> float:
    """RMS residual of a least-squares line fitted to one profile block."""
    z = np.asarray(profile_segment, dtype=float)
    n = z.size
    if n < _MIN_SCALE:
        raise ValueError(f"segment too short for linear detrending: {n} < {_MIN_SCALE}")
    i = np.arange(1.0, n + 1.0)
    ibar = (n + 1.0) / 2.0
    sxx = n * (n * n - 1.0) / 12.0
    slope = float(np.dot(z - z.mean(), i - ibar)) / sxx
    intercept = z.mean() - slope * ibar
    resid = z - (slope * i + intercept)
    return float(np.sqrt(np.mean(resid**2)))


def _fluctuation_at_scale(y: np.ndarray, n: int) -> float:
    """Mean over blocks of the detrended RMS fluctuation at scale n."""
    k = y.size // n
    z = y[: k * n].reshape(k, n)
    i = np.arange(1.0, n + 1.0)
    ibar = (n + 1.0) / 2.0
    sxx = n * (n * n - 1.0) / 12.0
    zbar = z.mean(axis=1)
    slope = (z @ (i - ibar)) / sxx
    intercept = zbar - slope * ibar
    resid = z - (np.outer(slope, i) + intercept[:, None])
    f_v = np.sqrt(np.mean(resid**2, axis=1))
    return float(np.mean(f_v))


def dfa_analysis(r) -> tuple[HurstEstimate, ScaleFit]:
    """Full DFA battery on a return series.

    Scales below 4 are excluded (the dyadic schedule never produces them,
    but the filter guards the contract); a scale whose blocks are all
    perfectly linear has F(n) = 0 and is dropped with a warning.
    """
    x = _values(r)
    if x.size < 16:
        raise ValueError(f"series too short for DFA: {x.size} < 16")
    y = np.cumsum(x - x.mean())
    points = []
    for n in make_schedule(x.size):
        if n < _MIN_SCALE:
            continue
        f = _fluctuation_at_scale(y, n)
        if f == 0.0:
            warnings.warn(f"zero fluctuation at scale {n}; scale dropped", stacklevel=2)
            continue
        points.append((np.log(n), np.log(f)))
    if len(points) < 3:
        raise ValueError("fewer than 3 usable scales; series is degenerate")
    fit = fit_loglog(points)
    return infer_hurst(fit, HurstMethod.DFA), fit
