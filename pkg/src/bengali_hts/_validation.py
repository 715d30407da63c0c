"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np

from .signal.audio import Waveform


class NotFittedError(ValueError, AttributeError):
    pass


def check_waveform(wav, sample_rate: int) -> Waveform:
    """Accept a :class:`Waveform` or a 1-D float array at ``sample_rate``."""
    if isinstance(wav, Waveform):
        if wav.sample_rate != sample_rate:
            raise ValueError(f"sample-rate mismatch: {wav.sample_rate} != {sample_rate}")
        return wav
    x = np.asarray(wav, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a mono signal, got shape {x.shape}")
    if x.size == 0:
        raise ValueError("empty waveform")
    if not np.all(np.isfinite(x)):
        raise ValueError("waveform contains non-finite samples")
    return Waveform(x, sample_rate)


def check_waveforms(X, sample_rate: int) -> list[Waveform]:
    if isinstance(X, (Waveform, np.ndarray)) and not (isinstance(X, np.ndarray) and X.ndim == 2):
        return [check_waveform(X, sample_rate)]
    return [check_waveform(x, sample_rate) for x in X]


def check_is_fitted(est, attr: str) -> None:
    if getattr(est, attr, None) is None:
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
