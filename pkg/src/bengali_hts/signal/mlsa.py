"""MLSA filter: mel-cepstrum driven time-domain synthesis filter.

The filter realizes ``H(z) = exp(sum_m b(m) Phi_m(z))`` with
``Phi_0 = 1`` and ``Phi_m(z) = (1 - a^2) z^-1 / (1 - a z^-1) * A(z)^(m-1)``
where ``A(z) = (z^-1 - a) / (1 - a z^-1)``. The exponential is replaced by
an (L, L) Padé approximant, applied as a gain ``exp(b(0))`` followed by two
cascaded sections: one for the ``b(1)`` term and one for ``b(2..M)``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np
from numba import njit

from .analysis import AnalysisConfig
from .audio import Waveform

PADE_ORDER = 5


def pade_coefficients(order: int = PADE_ORDER) -> np.ndarray:
    """Numerator coefficients of the (L, L) Padé approximant of ``exp(x)``.

    ``P(x) = sum_k (2L-k)! L! / ((2L)! k! (L-k)!) x^k`` and the denominator
    is ``P(-x)``.
    """
    if not 1 <= order <= 8:
        raise ValueError(f"Padé order must be in [1, 8], got {order}")
    L = order
    coefs = [
        Fraction(factorial(2 * L - k) * factorial(L),
                 factorial(2 * L) * factorial(k) * factorial(L - k))
        for k in range(L + 1)
    ]
    return np.array([float(c) for c in coefs])


def mc2b(mc, alpha: float) -> np.ndarray:
    """Mel-cepstrum to MLSA filter coefficients (works on the last axis)."""
    b = np.array(mc, dtype=np.float64, copy=True)
    for m in range(b.shape[-1] - 2, -1, -1):
        b[..., m] = b[..., m] - alpha * b[..., m + 1]
    return b


def b2mc(b, alpha: float) -> np.ndarray:
    """Inverse of :func:`mc2b`."""
    b = np.asarray(b, dtype=np.float64)
    mc = b.copy()
    mc[..., :-1] = b[..., :-1] + alpha * b[..., 1:]
    return mc


def warped_frequency(omega, alpha: float) -> np.ndarray:
    omega = np.asarray(omega, dtype=np.float64)
    return omega + 2.0 * np.arctan(alpha * np.sin(omega) / (1.0 - alpha * np.cos(omega)))


def mel_log_spectrum(mc, alpha: float, n_points: int = 257) -> np.ndarray:
    """Log-magnitude response in nepers on ``n_points`` uniform bins over [0, pi]."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    mc = np.asarray(mc, dtype=np.float64)
    omega = np.linspace(0.0, np.pi, n_points)
    wt = warped_frequency(omega, alpha)
    m = np.arange(mc.shape[-1])
    return np.cos(np.outer(wt, m)) @ mc


@njit(cache=True)
def _fir_section(xin, b, alpha, d):
    # d[i] tracks Phi_i applied to the section input (d[0] is the input itself)
    m = b.shape[0] - 1
    d[0] = xin
    d[1] = (1.0 - alpha * alpha) * d[0] + alpha * d[1]
    for i in range(2, m + 1):
        d[i] = d[i] + alpha * (d[i + 1] - d[i - 1])
    y = 0.0
    for i in range(2, m + 1):
        y += d[i] * b[i]
    for i in range(m + 1, 1, -1):
        d[i] = d[i - 1]
    return y


@njit(cache=True)
def _mlsa_run(x, b, alpha, pade, s1, p1, s2, p2, out):
    L = pade.shape[0] - 1
    gain = np.exp(b[0])
    beta = 1.0 - alpha * alpha
    for n in range(x.shape[0]):
        # section 1: exp(b1 * Phi_1)
        e = x[n] * gain
        acc = 0.0
        for l in range(L, 0, -1):
            s1[l] = beta * p1[l - 1] + alpha * s1[l]
            p1[l] = s1[l] * b[1]
            v = p1[l] * pade[l]
            if l % 2 == 1:
                e += v
            else:
                e -= v
            acc += v
        p1[0] = e
        y = acc + e
        # section 2: exp(sum_{m>=2} b_m Phi_m)
        e = y
        acc = 0.0
        for l in range(L, 0, -1):
            p2[l] = _fir_section(p2[l - 1], b, alpha, s2[l - 1])
            v = p2[l] * pade[l]
            if l % 2 == 1:
                e += v
            else:
                e -= v
            acc += v
        p2[0] = e
        out[n] = acc + e


class MLSAFilter:
    """Stateful MLSA filter; use one instance per utterance.

    Parameters
    ----------
    order : int
        Mel-cepstral order ``M`` (coefficient vectors have ``M + 1`` entries).
    alpha : float
        Frequency warping factor.
    pade_order : int
        Order of the Padé approximant of the exponential.
    """

    def __init__(self, order: int, alpha: float, pade_order: int = PADE_ORDER):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        self.alpha = float(alpha)
        self.pade = pade_coefficients(pade_order)
        L = pade_order
        self._s1 = np.zeros(L + 1)
        self._p1 = np.zeros(L + 1)
        self._s2 = np.zeros((L, order + 2))
        self._p2 = np.zeros(L + 1)

    def __call__(self, x: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Filter ``x`` with the coefficient vector ``b`` held constant."""
        b = np.ascontiguousarray(b, dtype=np.float64)
        if b.shape != (self.order + 1,):
            raise ValueError(f"expected {self.order + 1} coefficients, got {b.shape}")
        x = np.ascontiguousarray(x, dtype=np.float64)
        out = np.empty_like(x)
        _mlsa_run(x, b, self.alpha, self.pade, self._s1, self._p1, self._s2, self._p2, out)
        return out


def mlsa_synthesize(b_frames: np.ndarray, excitation: Waveform | np.ndarray, alpha: float,
                    cfg: AnalysisConfig = AnalysisConfig()) -> Waveform:
    """Filter an excitation frame by frame, switching coefficients at frame boundaries."""
    b_frames = np.atleast_2d(np.asarray(b_frames, dtype=np.float64))
    x = excitation.samples if isinstance(excitation, Waveform) else np.asarray(excitation, float)
    S = cfg.frame_shift
    if x.shape[0] != b_frames.shape[0] * S:
        raise ValueError(
            f"excitation has {x.shape[0]} samples, expected {b_frames.shape[0]} frames x {S}")
    filt = MLSAFilter(b_frames.shape[1] - 1, alpha)
    out = np.empty_like(x)
    for t in range(b_frames.shape[0]):
        out[t * S:(t + 1) * S] = filt(x[t * S:(t + 1) * S], b_frames[t])
    return Waveform(out, cfg.sample_rate)


def impulse_response(b: np.ndarray, alpha: float, length: int = 4096) -> np.ndarray:
    x = np.zeros(length)
    x[0] = 1.0
    return MLSAFilter(len(b) - 1, alpha)(x, b)
