"""Shared machinery for the two Hurst estimators.

Both rescaled-range and detrended fluctuation analysis reduce to the same
skeleton: a dyadic schedule of block sizes, one summary statistic per scale,
and an OLS fit of ln(statistic) on ln(scale) whose slope is the Hurst
exponent.  Inference on the slope uses the OLS standard error with a
Student-t reference; the per-scale points are serially dependent, so the
resulting intervals are approximations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

__all__ = [
    "ScaleSchedule",
    "ScaleFit",
    "HurstEstimate",
    "HurstMethod",
    "make_schedule",
    "fit_loglog",
    "infer_hurst",
]


class HurstMethod(str, Enum):
    RS = "rs"
    DFA = "dfa"


@dataclass(frozen=True)
class ScaleSchedule:
    """Descending block sizes floor(N / 2^p), p = 0 .. floor(log2(N / 4))."""

    n_values: tuple[int, ...]

    def __iter__(self):
        return iter(self.n_values)

    def __len__(self):
        return len(self.n_values)


@dataclass(frozen=True)
class ScaleFit:
    """OLS fit of ln(statistic) against ln(scale).

    ``slope`` is the Hurst point estimate, ``intercept`` is ln(c) of the
    power law, and ``slope_se`` is the classical OLS slope standard error
    with ``dof = len(points) - 2``.
    """

    ln_n: np.ndarray
    ln_stat: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    slope_se: float
    dof: int

    def __post_init__(self):
        for name in ("ln_n", "ln_stat"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.ln_n.tolist(), self.ln_stat.tolist()))

    @property
    def fitted(self) -> np.ndarray:
        return self.slope * self.ln_n + self.intercept

    def plot_rows(self) -> list[tuple[float, float, float]]:
        """(ln_n, ln_stat, fitted) triples for the log-log plot-data CSV."""
        return list(zip(self.ln_n.tolist(), self.ln_stat.tolist(), self.fitted.tolist()))


@dataclass(frozen=True)
class HurstEstimate:
    """Hurst point estimate with 95% CI and one-sided test of H = 0.5."""

    h: float
    ci_low: float
    ci_high: float
    p_value: float
    r_squared: float
    method: HurstMethod

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "p_value": self.p_value,
            "r_squared": self.r_squared,
            "method": self.method.value,
        }


def make_schedule(n_total: int) -> ScaleSchedule:
    """Dyadic scale schedule for a series of ``n_total`` points.

    Scales are floor(n_total / 2^p) for p = 0 .. floor(log2(n_total / 4)),
    deduplicated, in descending order; the smallest scale is always >= 4.
    """
    n_total = int(n_total)
    if n_total < 16:
        raise ValueError(f"need at least 16 points for two usable scales, got {n_total}")
    p_max = n_total.bit_length() - 3  # floor(log2(n_total)) - 2
    scales = []
    for p in range(p_max + 1):
        n = n_total >> p
        if not scales or scales[-1] != n:
            scales.append(n)
    return ScaleSchedule(n_values=tuple(scales))


def fit_loglog(points) -> ScaleFit:
    """OLS fit of ln(stat) on ln(n) for a sequence of (ln n, ln stat) pairs."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (ln n, ln stat) pairs")
    x, y = pts[:, 0], pts[:, 1]
    if len(np.unique(x)) < 3:
        raise ValueError("need at least 3 distinct ln n values")
    xbar = x.mean()
    ybar = y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    sxy = float(np.sum((x - xbar) * (y - ybar)))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    resid = y - (slope * x + intercept)
    ssr = float(np.sum(resid**2))
    sst = float(np.sum((y - ybar) ** 2))
    r_squared = 1.0 - ssr / sst if sst > 0 else 1.0
    dof = len(x) - 2
    slope_se = float(np.sqrt(max(ssr, 0.0) / dof / sxx))
    return ScaleFit(
        ln_n=x,
        ln_stat=y,
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        slope_se=slope_se,
        dof=dof,
    )


def infer_hurst(fit: ScaleFit, method: HurstMethod) -> HurstEstimate:
    """Slope inference: one-sided p-value for H0: H = 0.5 vs Ha: H > 0.5.

    Uses a Student-t reference with the fit's residual degrees of freedom.
    A zero standard error (exactly collinear points) degenerates to p = 0 or
    1 by the sign of slope - 0.5, with a collapsed interval.
    """
    method = HurstMethod(method)
    if fit.dof < 1:
        raise ValueError("need dof >= 1 for slope inference")
    h = fit.slope
    if fit.slope_se == 0.0:
        p = 0.5 if h == 0.5 else (0.0 if h > 0.5 else 1.0)
        return HurstEstimate(
            h=h, ci_low=h, ci_high=h, p_value=p,
            r_squared=fit.r_squared, method=method,
        )
    t = (h - 0.5) / fit.slope_se
    p_value = float(stats.t.sf(t, fit.dof))
    half_width = float(stats.t.ppf(0.975, fit.dof)) * fit.slope_se
    return HurstEstimate(
        h=h,
        ci_low=h - half_width,
        ci_high=h + half_width,
        p_value=p_value,
        r_squared=fit.r_squared,
        method=method,
    )
