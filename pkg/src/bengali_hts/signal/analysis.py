"""Framing, frequency warping and mel-cepstral analysis."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .audio import Waveform

FFT_SIZE = 512
POWER_FLOOR = 1e-10
N_CEPSTRUM = 128


@dataclass(frozen=True)
class AnalysisConfig:
    sample_rate: int = 16000
    frame_length: int = 400
    frame_shift: int = 80
    window: str = "blackman"
    order: int = 24
    alpha: float = 0.42
    f0_min: float = 60.0
    f0_max: float = 400.0
    voicing_threshold: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.frame_shift <= self.frame_length:
            raise ValueError("need 0 < frame_shift <= frame_length")
        if not 0.0 < self.f0_min < self.f0_max:
            raise ValueError("F0 search range must be positive and ordered")
        if self.order < 1:
            raise ValueError("cepstral order must be >= 1")
        if self.window != "blackman":
            raise ValueError(f"unsupported window {self.window!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """Stable hash used to key feature caches."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def n_frames(n_samples: int, cfg: AnalysisConfig) -> int:
    if n_samples <= 0:
        raise ValueError("empty waveform")
    if n_samples < cfg.frame_length:
        return 1
    return (n_samples - cfg.frame_length) // cfg.frame_shift + 1


def frame_signal(wav: Waveform | np.ndarray, cfg: AnalysisConfig = AnalysisConfig(),
                 window: bool = True) -> np.ndarray:
    """Cut a waveform into (optionally Blackman-windowed) frames.

    Returns an array of shape ``(n_frames, frame_length)``. A signal shorter
    than one frame yields a single zero-padded frame.
    """
    x = wav.samples if isinstance(wav, Waveform) else np.asarray(wav, dtype=np.float64)
    n = n_frames(x.shape[0], cfg)
    L, S = cfg.frame_length, cfg.frame_shift
    if x.shape[0] < L:
        x = np.concatenate([x, np.zeros(L - x.shape[0])])
    idx = np.arange(n)[:, None] * S + np.arange(L)[None, :]
    frames = x[idx]
    if window:
        frames = frames * np.blackman(L)
    return frames


def freqt(c, alpha: float, order: int) -> np.ndarray:
    """Warp a cepstrum onto the all-pass frequency axis with parameter ``alpha``.

    ``freqt(c, a, m)`` maps an unwarped cepstrum to a mel-cepstrum of order
    ``m``; ``freqt(mc, -a, m)`` undoes it (exactly only in the limit of
    generous orders).
    """
    if abs(alpha) >= 1.0:
        raise ValueError(f"|alpha| must be < 1, got {alpha}")
    c = np.asarray(c, dtype=np.float64)
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite cepstrum")
    beta = 1.0 - alpha * alpha
    g = np.zeros(order + 1)
    for i in range(c.shape[0] - 1, -1, -1):
        prev = g.copy()
        g[0] = c[i] + alpha * prev[0]
        if order >= 1:
            g[1] = beta * prev[0] + alpha * prev[1]
        for m in range(2, order + 1):
            g[m] = prev[m - 1] + alpha * (prev[m] - g[m - 1])
    return g


@lru_cache(maxsize=32)
def freqt_matrix(n_in: int, order: int, alpha: float) -> np.ndarray:
    """Linear operator form of :func:`freqt`, shape ``(order + 1, n_in)``."""
    eye = np.eye(n_in)
    mat = np.stack([freqt(eye[i], alpha, order) for i in range(n_in)], axis=1)
    mat.setflags(write=False)
    return mat


def real_cepstrum(frames: np.ndarray, n_fft: int = FFT_SIZE,
                  n_coef: int = N_CEPSTRUM) -> np.ndarray:
    """Cepstrum of the log-magnitude spectrum, i.e. of half the log periodogram."""
    frames = np.atleast_2d(frames)
    power = np.abs(np.fft.rfft(frames, n=n_fft, axis=-1)) ** 2
    log_mag = 0.5 * np.log(np.maximum(power, POWER_FLOOR))
    ceps = np.fft.irfft(log_mag, n=n_fft, axis=-1)[:, :n_coef]
    # fold the symmetric half so that log|X| = c0 + 2 sum c_m cos(m w)
    ceps[:, 1:] *= 2.0
    return ceps


def mel_cepstral_analysis(frame, order: int = 24, alpha: float = 0.42) -> np.ndarray:
    """Mel-cepstrum ``c(0..order)`` of one windowed frame.

    Log periodogram (512-point FFT, power floored at 1e-10), inverse
    transform to the first 128 real-cepstrum coefficients, then
    :func:`freqt` to ``order`` at ``alpha``. Coefficients follow the
    convention ``log|H(e^jw)| = sum_m c(m) cos(m * warped(w))``.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if order < 1:
        raise ValueError("order must be >= 1")
    if not np.all(np.isfinite(frame)):
        raise ValueError("non-finite input frame")
    if frame.ndim != 1:
        raise ValueError("expected a single 1-D frame")
    ceps = real_cepstrum(frame)[0]
    return freqt_matrix(N_CEPSTRUM, order, float(alpha)) @ ceps


def mel_cepstrogram(wav: Waveform, cfg: AnalysisConfig = AnalysisConfig()) -> np.ndarray:
    """Frame-by-frame mel-cepstra, shape ``(n_frames, order + 1)``."""
    if wav.sample_rate != cfg.sample_rate:
        raise ValueError(f"sample-rate mismatch: {wav.sample_rate} != {cfg.sample_rate}")
    frames = frame_signal(wav, cfg)
    ceps = real_cepstrum(frames)
    return ceps @ freqt_matrix(N_CEPSTRUM, cfg.order, float(cfg.alpha)).T
