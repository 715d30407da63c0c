"""Global-variance compensation of generated mel-cepstral trajectories."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..model.modelset import GVModel
from .mlpg import band_matvec

_MAX_HALVINGS = 40


def _objective(c, c_ml, band, weight, mu, var):
    T = c.shape[0]
    v = np.var(c)
    diff = c - c_ml
    hmm = -0.5 * diff @ (band_matvec(band, diff) if band is not None else diff) / T
    return -0.5 * weight * (v - mu) ** 2 / var + hmm


def _gradient(c, c_ml, band, weight, mu, var):
    T = c.shape[0]
    v = np.var(c)
    diff = c - c_ml
    g = -weight * (v - mu) / var * (2.0 / T) * (c - c.mean())
    g -= (band_matvec(band, diff) if band is not None else diff) / T
    return g - g.mean()


def apply_gv(c: np.ndarray, gv: GVModel, weight: float = 0.0, step: float = 0.01,
             iterations: int = 50, bands: Sequence[np.ndarray] | None = None) -> np.ndarray:
    """Pull each dimension's utterance variance towards the GV mean.

    Maximizes, per dimension and by gradient ascent from the ML trajectory
    ``c``, ``weight * log N(v(c); gv.mean, gv.variance)`` plus the HMM term
    ``-(1/2T) (c - c_ml)' P (c - c_ml)``, where ``P`` is the dimension's
    normal-equation matrix (``bands``, band storage) or the identity.

    The gradient is projected onto zero-mean directions, so every
    dimension keeps its mean. Each step starts from ``step`` times the
    trajectory's spread (relative to the largest gradient entry) and is
    halved until the objective does not decrease; successful steps double
    the next trial step.
    """
    c = np.asarray(c, dtype=np.float64)
    if not np.all(np.isfinite(c)):
        raise ValueError("trajectory must be finite")
    if weight < 0:
        raise ValueError("GV weight must be >= 0")
    if weight == 0 or c.shape[0] < 2:
        return c.copy()
    out = c.copy()
    D = c.shape[1]
    for d in range(min(D, gv.mean.shape[0])):
        band = None if bands is None else bands[d]
        args = (c[:, d], band, weight, gv.mean[d], gv.variance[d])
        x = out[:, d].copy()
        f = _objective(x, *args)
        scale = max(np.std(x), np.sqrt(gv.mean[d]), 1e-8)
        alpha = None
        for _ in range(iterations):
            g = _gradient(x, *args)
            gmax = np.max(np.abs(g))
            if gmax == 0.0:
                break
            if alpha is None:
                alpha = step * scale / gmax
            for _ in range(_MAX_HALVINGS):
                trial = x + alpha * g
                ft = _objective(trial, *args)
                if ft >= f:
                    x, f = trial, ft
                    alpha *= 2.0
                    break
                alpha *= 0.5
            else:
                break
        out[:, d] = x
    return out
