"""Per-state output and duration distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VARIANCE_FLOOR = 1e-6
DURATION_MEAN_FLOOR = 1.0
DURATION_VARIANCE_FLOOR = 0.25
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class StreamGaussian:
    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.variance = np.maximum(np.asarray(self.variance, dtype=np.float64), VARIANCE_FLOOR)
        if self.mean.shape != self.variance.shape:
            raise ValueError("mean and variance must have the same shape")

    def log_pdf(self, x: np.ndarray) -> np.ndarray:
        return gaussian_log_pdf(x, self.mean, self.variance)

    def __eq__(self, other):
        return (isinstance(other, StreamGaussian)
                and np.array_equal(self.mean, other.mean)
                and np.array_equal(self.variance, other.variance))


@dataclass
class MSDGaussian:
    """Two-space distribution: a voiced Gaussian space and a zero-dimensional unvoiced space."""

    voiced_weight: float
    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.voiced_weight <= 1.0:
            raise ValueError(f"voiced weight {self.voiced_weight} outside [0, 1]")
        self.voiced_weight = float(self.voiced_weight)
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.variance = np.maximum(np.asarray(self.variance, dtype=np.float64), VARIANCE_FLOOR)

    @property
    def unvoiced_weight(self) -> float:
        return 1.0 - self.voiced_weight

    def __eq__(self, other):
        return (isinstance(other, MSDGaussian)
                and self.voiced_weight == other.voiced_weight
                and np.array_equal(self.mean, other.mean)
                and np.array_equal(self.variance, other.variance))


@dataclass
class DurationGaussian:
    mean: float
    variance: float

    def __post_init__(self):
        self.mean = max(float(self.mean), DURATION_MEAN_FLOOR)
        self.variance = max(float(self.variance), DURATION_VARIANCE_FLOOR)


def gaussian_log_pdf(x, mean, variance) -> np.ndarray:
    """Diagonal Gaussian log density over the last axis."""
    x = np.asarray(x, dtype=np.float64)
    diff = x - mean
    return -0.5 * (np.sum(diff * diff / variance, axis=-1)
                   + np.sum(np.log(variance)) + mean.shape[-1] * _LOG_2PI)


def _safe_log(w: float) -> float:
    return float(np.log(w)) if w > 0.0 else -np.inf


def msd_log_prob(obs, g: MSDGaussian) -> float:
    """Log probability of a voiced triple (array) or an unvoiced frame (``None``).

    Unvoiced frames score ``log(1 - w_v)``; voiced frames score
    ``log(w_v) + log N(x; mean, diag(variance))``. A zero space weight gives
    ``-inf`` rather than an error.
    """
    if obs is None:
        return _safe_log(g.unvoiced_weight)
    if g.voiced_weight <= 0.0:
        return -np.inf
    return _safe_log(g.voiced_weight) + float(gaussian_log_pdf(obs, g.mean, g.variance))


def msd_log_prob_frames(lf0: np.ndarray, voiced: np.ndarray, g: MSDGaussian) -> np.ndarray:
    """Vectorized :func:`msd_log_prob` over frames (``lf0`` is ``(T, 3)``)."""
    out = np.full(voiced.shape[0], _safe_log(g.unvoiced_weight))
    if voiced.any():
        if g.voiced_weight <= 0.0:
            out[voiced] = -np.inf
        else:
            out[voiced] = np.log(g.voiced_weight) + gaussian_log_pdf(
                lf0[voiced], g.mean, g.variance)
    return out
