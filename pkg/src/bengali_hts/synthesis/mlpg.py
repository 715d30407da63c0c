"""Maximum-likelihood parameter generation with dynamic features.

For each feature dimension the static trajectory ``c`` solves
``(W' S^-1 W) c = W' S^-1 mu``; ``W' S^-1 W`` is banded, so a banded
Cholesky factorization gives the solution in ``O(T * band^2)``.
"""

from __future__ import annotations

import numba
import numpy as np

from ..signal.deltas import DeltaWindows


@numba.njit(cache=True)
def _band_cholesky_solve(band, rhs):
    """Solve ``P x = rhs`` for symmetric positive-definite banded ``P``.

    ``band[i, j] = P[i, i + j]`` for ``j = 0..bw``. Returns ``(x, ok)``;
    ``ok`` is False if a pivot is not positive.
    """
    T, w = band.shape
    bw = w - 1
    # L[i, j] holds the lower factor entry L[i, i - j]
    L = np.zeros((T, w))
    for i in range(T):
        for j in range(min(bw, i), 0, -1):
            k = i - j
            s = band[k, j]
            for m in range(1, bw - j + 1):
                if k - m < 0:
                    break
                s -= L[i, j + m] * L[k, m]
            L[i, j] = s / L[k, 0]
        s = band[i, 0]
        for m in range(1, min(bw, i) + 1):
            s -= L[i, m] * L[i, m]
        if not s > 0.0:
            return np.zeros(T), False
        L[i, 0] = np.sqrt(s)
    y = np.empty(T)
    for i in range(T):
        s = rhs[i]
        for m in range(1, min(bw, i) + 1):
            s -= L[i, m] * y[i - m]
        y[i] = s / L[i, 0]
    x = np.empty(T)
    for i in range(T - 1, -1, -1):
        s = y[i]
        for m in range(1, min(bw, T - 1 - i) + 1):
            s -= L[i + m, m] * x[i + m]
        x[i] = s / L[i, 0]
    return x, True


def band_solve(band: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    band = np.ascontiguousarray(band, dtype=np.float64)
    x, ok = _band_cholesky_solve(band, np.ascontiguousarray(rhs, dtype=np.float64))
    if not ok:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return x


def band_matvec(band: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``P @ x`` for the symmetric band storage used by :func:`band_solve`."""
    T, w = band.shape
    out = band[:, 0] * x
    for j in range(1, w):
        out[:T - j] += band[:T - j, j] * x[j:]
        out[j:] += band[:T - j, j] * x[:T - j]
    return out


def _active_windows(windows: DeltaWindows) -> list[int]:
    return [k for k, w in enumerate(windows.windows) if any(v != 0.0 for v in w)]


def _is_identity(w) -> bool:
    # a centred unit tap, zero elsewhere
    half = len(w) // 2
    return w[half] == 1.0 and all(v == 0.0 for i, v in enumerate(w) if i != half)


def normal_equations(mean: np.ndarray, variance: np.ndarray, windows: DeltaWindows):
    """Band storage of ``W' S^-1 W`` and ``W' S^-1 mu`` for one dimension.

    ``mean`` and ``variance`` are ``(T, n_windows)``. Taps that fall outside
    the utterance are folded onto the edge frames, matching the edge
    replication of the delta computation.
    """
    T = mean.shape[0]
    bw = 2 * windows.max_half_width
    band = np.zeros((T, bw + 1))
    rhs = np.zeros(T)
    t = np.arange(T)
    for k in _active_windows(windows):
        win = windows.windows[k]
        h = len(win) // 2
        prec = 1.0 / variance[:, k]
        taps = [(np.clip(t + j - h, 0, T - 1), w) for j, w in enumerate(win) if w != 0.0]
        for c1, w1 in taps:
            np.add.at(rhs, c1, w1 * prec * mean[:, k])
            for c2, w2 in taps:
                upper = c2 >= c1
                np.add.at(band, (c1[upper], (c2 - c1)[upper]), w1 * w2 * prec[upper])
    return band, rhs


def mlpg(mean: np.ndarray, variance: np.ndarray, windows: DeltaWindows = DeltaWindows(),
         return_band: bool = False):
    """Static trajectories from stacked static/dynamic means and variances.

    Parameters
    ----------
    mean, variance : ndarray, shape (T, n_windows * D)
        Blocks ordered ``[static | delta | delta-delta]`` as produced by
        :func:`~bengali_hts.signal.deltas.compute_deltas`.
    windows : DeltaWindows
    return_band : bool
        Also return each dimension's band matrix (for the GV step).

    Returns
    -------
    ndarray, shape (T, D)
    """
    mean = np.asarray(mean, dtype=np.float64)
    variance = np.asarray(variance, dtype=np.float64)
    K = len(windows)
    T, KD = mean.shape
    if KD % K or variance.shape != mean.shape:
        raise ValueError("mean/variance must be (T, n_windows * D) and equal in shape")
    if T == 0:
        raise ValueError("no frames to generate")
    if np.any(variance <= 0) or not np.all(np.isfinite(variance)):
        raise ValueError("variances must be positive and finite")
    D = KD // K
    m3 = mean.reshape(T, K, D)
    v3 = variance.reshape(T, K, D)
    active = _active_windows(windows)
    if active == [0] and _is_identity(windows.windows[0]):
        # W is the identity: the solution is the static mean itself
        out = m3[:, 0, :].copy()
        bands = [np.stack([1.0 / v3[:, 0, d]], axis=1) for d in range(D)]
        return (out, bands) if return_band else out
    out = np.empty((T, D))
    bands = []
    for d in range(D):
        band, rhs = normal_equations(m3[:, :, d], v3[:, :, d], windows)
        out[:, d] = band_solve(band, rhs)
        bands.append(band)
    return (out, bands) if return_band else out
