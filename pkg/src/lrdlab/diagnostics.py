"""Moment statistics and normality tests for return series.

Sample skewness and kurtosis use the biased (population) central-moment
normalization.  The skewness test follows D'Agostino's (1970) transformed-Z
construction, the kurtosis test Anscombe & Glynn's (1983); the omnibus
statistic is the sum of the two squared Z scores against chi-square(2).
All tests are two-sided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .series import ReturnSeries

__all__ = [
    "MomentReport",
    "moments",
    "skewness_ztest",
    "kurtosis_ztest",
    "histogram_data",
    "qq_data",
]

_MIN_N = 20  # below this the kurtosis-Z normal approximation is unreliable


def _values(r) -> np.ndarray:
    if isinstance(r, ReturnSeries):
        return r.values
    return np.asarray(r, dtype=float)


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: float
    std: float
    skewness: float
    excess_kurtosis: float
    p_skew: float
    p_kurt: float
    p_omnibus: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "std": self.std,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "p_skew": self.p_skew,
            "p_kurt": self.p_kurt,
            "p_omnibus": self.p_omnibus,
        }


def skewness_ztest(g1: float, n: int) -> tuple[float, float]:
    """D'Agostino transformed-skewness Z and its two-sided p-value."""
    if n < 8:
        raise ValueError("skewness Z transform needs n >= 8")
    y = g1 * np.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    )
    w2 = -1.0 + np.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / np.sqrt(0.5 * np.log(w2))
    alpha = np.sqrt(2.0 / (w2 - 1.0))
    if y == 0.0:
        y = 1.0  # exactly symmetric sample; matches the reference convention
    z = delta * np.log(y / alpha + np.sqrt((y / alpha) ** 2 + 1.0))
    return float(z), float(2.0 * stats.norm.sf(abs(z)))


def kurtosis_ztest(b2: float, n: int) -> tuple[float, float]:
    """Anscombe-Glynn transformed-kurtosis Z and its two-sided p-value.

    ``b2`` is the raw (non-excess) kurtosis m4 / m2^2.
    """
    if n < 5:
        raise ValueError("kurtosis Z transform needs n >= 5")
    e_b2 = 3.0 * (n - 1.0) / (n + 1.0)
    var_b2 = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) ** 2 * (n + 3.0) * (n + 5.0))
    x = (b2 - e_b2) / np.sqrt(var_b2)
    sqrt_beta1 = (
        6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * np.sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)))
    )
    a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + np.sqrt(1.0 + 4.0 / sqrt_beta1**2))
    term1 = 1.0 - 2.0 / (9.0 * a)
    denom = 1.0 + x * np.sqrt(2.0 / (a - 4.0))
    if denom == 0.0:
        raise FloatingPointError("degenerate kurtosis transform (zero denominator)")
    term2 = np.sign(denom) * ((1.0 - 2.0 / a) / abs(denom)) ** (1.0 / 3.0)
    z = (term1 - term2) / np.sqrt(2.0 / (9.0 * a))
    return float(z), float(2.0 * stats.norm.sf(abs(z)))


def moments(r) -> MomentReport:
    """Moment report with skewness, excess kurtosis, and normality p-values."""
    x = _values(r)
    n = x.size
    if n < _MIN_N:
        raise ValueError(f"need at least {_MIN_N} observations, got {n}")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    if m2 == 0.0:
        raise ValueError("zero variance: all returns identical")
    m3 = float(np.mean(dev**3))
    m4 = float(np.mean(dev**4))
    g1 = m3 / m2**1.5
    b2 = m4 / m2**2
    z_skew, p_skew = skewness_ztest(g1, n)
    z_kurt, p_kurt = kurtosis_ztest(b2, n)
    k2 = z_skew**2 + z_kurt**2
    p_omnibus = float(stats.chi2.sf(k2, 2))
    return MomentReport(
        n=n,
        mean=mean,
        std=float(np.sqrt(m2)),
        skewness=g1,
        excess_kurtosis=b2 - 3.0,
        p_skew=p_skew,
        p_kurt=p_kurt,
        p_omnibus=p_omnibus,
    )


def histogram_data(r, bins: int = 50) -> dict:
    """Histogram counts and bin edges, as plot-data for external tools."""
    x = _values(r)
    counts, edges = np.histogram(x, bins=bins)
    return {"bin_edges": edges.tolist(), "counts": counts.tolist()}


def qq_data(r) -> dict:
    """Sorted sample vs matching normal quantiles (plotting positions (i-0.5)/n)."""
    x = np.sort(_values(r))
    n = x.size
    probs = (np.arange(1, n + 1) - 0.5) / n
    theo = stats.norm.ppf(probs) * x.std() + x.mean()
    return {"theoretical": theo.tolist(), "sample": x.tolist()}
