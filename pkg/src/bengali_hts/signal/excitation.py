"""Pulse/noise excitation for the MLSA filter."""

from __future__ import annotations

import numpy as np

from .analysis import AnalysisConfig
from .audio import Waveform


def generate_excitation(f0_hz: np.ndarray, cfg: AnalysisConfig = AnalysisConfig(),
                        seed: int = 0) -> Waveform:
    """Build an excitation of ``len(f0_hz) * frame_shift`` samples.

    Voiced frames (finite, positive F0) carry an impulse train of period
    ``sample_rate / F0`` and amplitude ``sqrt(period)``, so average power is
    one; pulse phase carries over between consecutive voiced frames.
    Unvoiced frames carry unit-variance Gaussian noise from ``seed``.
    """
    f0_hz = np.asarray(f0_hz, dtype=np.float64)
    S = cfg.frame_shift
    fs = cfg.sample_rate
    rng = np.random.default_rng(seed)
    out = np.zeros(f0_hz.shape[0] * S)
    next_pulse = None
    for t, f0 in enumerate(f0_hz):
        start, stop = t * S, (t + 1) * S
        if not (np.isfinite(f0) and f0 > 0):
            out[start:stop] = rng.standard_normal(S)
            next_pulse = None
            continue
        period = fs / f0
        if next_pulse is None or next_pulse < start:
            next_pulse = float(start)
        while next_pulse < stop:
            pos = int(np.floor(next_pulse + 0.5))
            if pos >= stop:
                break
            out[pos] = np.sqrt(period)
            next_pulse += period
    return Waveform(out, fs)
