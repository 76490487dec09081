"""Invertible return preprocessing for adversarial training.

Heavy-tailed returns are mapped toward Gaussianity with the Lambert-W
transform (u = sign(x) sqrt(W(delta x^2) / delta) on standardized values),
with delta chosen by bisection so the transformed sample has kurtosis 3.
Plain standardization (delta = 0) is the fallback when the data are not
leptokurtic.  The forward map re-inflates generated values, so synthetic
returns inherit the data's tail weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw


@dataclass(frozen=True)
class Preprocess:
    mean: float
    std: float
    delta: float
    inner_mean: float
    inner_std: float
    scheme: str  # "lambert" or "standardize"

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("mean", "std", "delta", "inner_mean", "inner_std", "scheme")}

    @classmethod
    def from_dict(cls, d: dict) -> "Preprocess":
        return cls(**d)


def _gaussianize(z: np.ndarray, delta: float) -> np.ndarray:
    if delta <= 0.0:
        return z
    w = np.real(lambertw(delta * z * z))
    return np.sign(z) * np.sqrt(np.maximum(w, 0.0) / delta)


def _kurtosis(x: np.ndarray) -> float:
    dev = x - x.mean()
    m2 = np.mean(dev**2)
    return float(np.mean(dev**4) / m2**2)


def fit_preprocess(returns: np.ndarray) -> Preprocess:
    """Estimate the transform from data; delta by bisection on kurtosis."""
    mean, std = float(returns.mean()), float(returns.std())
    z = (returns - mean) / std
    if _kurtosis(z) <= 3.05:
        return Preprocess(mean=mean, std=std, delta=0.0,
                          inner_mean=0.0, inner_std=1.0, scheme="standardize")
    lo, hi = 0.0, 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _kurtosis(_gaussianize(z, mid)) > 3.0:
            lo = mid
        else:
            hi = mid
    delta = 0.5 * (lo + hi)
    u = _gaussianize(z, delta)
    return Preprocess(mean=mean, std=std, delta=delta,
                      inner_mean=float(u.mean()), inner_std=float(u.std()),
                      scheme="lambert")


def encode(returns: np.ndarray, pp: Preprocess) -> np.ndarray:
    """Data -> training space (approximately standard normal)."""
    z = (returns - pp.mean) / pp.std
    u = _gaussianize(z, pp.delta)
    return (u - pp.inner_mean) / pp.inner_std


def decode(samples: np.ndarray, pp: Preprocess) -> np.ndarray:
    """Training space -> return units (inverse of :func:`encode`)."""
    u = samples * pp.inner_std + pp.inner_mean
    z = u * np.exp(pp.delta * u * u / 2.0) if pp.delta > 0.0 else u
    return z * pp.std + pp.mean
