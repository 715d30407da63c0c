"""Normalized-autocorrelation F0 estimation with a voicing decision."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import median_filter
from scipy.signal import butter, sosfiltfilt

from .analysis import AnalysisConfig, n_frames
from .audio import Waveform

# frames whose RMS is below this are unvoiced regardless of periodicity
_SILENCE_RMS = 1e-6
# earliest peak reaching this fraction of the best peak wins (guards octave-down errors)
_PEAK_RATIO = 0.85
# the period lag is picked below this frequency, where pulse-position jitter is harmless
_LOWPASS_HZ = 1000.0
# post-processing: voiced runs shorter than this are dropped, then logF0 is
# median-smoothed over this many frames inside each voiced run
_MIN_RUN = 3
_MEDIAN_WIDTH = 5
# a frame further than this ratio from its neighbourhood median is an octave
# error; the neighbourhood is +-_OUTLIER_REACH frames clipped to the voiced run
_OUTLIER_RATIO = 1.25
_OUTLIER_REACH = 4
# samples correlated per lag
_CORR_LENGTH = 320


def _parabolic_offset(y0: float, y1: float, y2: float) -> float:
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (y0 - y2) / denom, -0.5, 0.5))


def nccf(frame: np.ndarray, lookahead: np.ndarray, lags: np.ndarray) -> np.ndarray:
    """Normalized cross-correlation of a frame against its lagged copies.

    ``lookahead`` holds the frame followed by at least ``lags.max()`` more
    samples.
    """
    L = frame.shape[0]
    seg = np.lib.stride_tricks.sliding_window_view(lookahead, L)[lags]
    num = seg @ frame
    e0 = frame @ frame
    el = np.einsum("ij,ij->i", seg, seg)
    den = np.sqrt(e0 * el)
    out = np.zeros_like(num)
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


def estimate_f0(wav: Waveform, cfg: AnalysisConfig = AnalysisConfig()) -> np.ndarray:
    """Per-frame F0 in Hz, NaN where unvoiced.

    Frames are centred like those of
    :func:`~bengali_hts.signal.analysis.frame_signal`. A fixed-length segment
    around each frame centre is correlated with its lagged continuation for
    lags covering ``[f0_min, f0_max]``; the frame is
    voiced iff the correlation peak reaches ``voicing_threshold``. The period
    is then read from the same correlation on a 1 kHz low-passed copy
    (earliest peak within 85% of the best) and refined by parabolic
    interpolation. Finally, voiced runs shorter than three frames are set
    unvoiced, frames far from their local median are replaced by it, and each
    run is median-filtered (width 5, in the log domain).
    """
    if wav.sample_rate != cfg.sample_rate:
        raise ValueError(f"sample-rate mismatch: {wav.sample_rate} != {cfg.sample_rate}")
    fs = cfg.sample_rate
    x = wav.samples
    L, S = cfg.frame_length, cfg.frame_shift
    lag_min = max(1, int(np.floor(fs / cfg.f0_max)))
    lag_max = int(np.ceil(fs / cfg.f0_min))
    # one extra lag on each side for interpolation
    lags = np.arange(lag_min - 1, lag_max + 2)
    n = n_frames(x.shape[0], cfg)
    C = _CORR_LENGTH
    span = C + lags[-1]
    # the correlated region [frame centre - span/2, frame centre + span/2)
    # is centred on the frame so it reaches equally into both neighbours
    lead = span // 2
    pad = np.zeros(lead + L + span)
    padded = np.concatenate([pad[:lead + L], x, pad])
    if x.shape[0] > 30:
        smooth = sosfiltfilt(butter(4, _LOWPASS_HZ, fs=fs, output="sos"), x)
    else:
        smooth = x
    smooth = np.concatenate([pad[:lead + L], smooth, pad])
    f0 = np.full(n, np.nan)
    for t in range(n):
        centre = lead + L + t * S + L // 2
        frame = padded[centre - L // 2:centre + L - L // 2]
        if np.sqrt(np.mean(frame * frame)) < _SILENCE_RMS:
            continue
        start = centre - lead
        r = nccf(padded[start:start + C], padded[start:start + span], lags)
        if r[1:-1].max() < cfg.voicing_threshold:
            continue
        r = nccf(smooth[start:start + C], smooth[start:start + span], lags)
        inner = r[1:-1]
        peaks = np.flatnonzero((inner >= r[:-2]) & (inner > r[2:])) + 1
        if peaks.size == 0:
            continue
        best = r[peaks].max()
        k = peaks[np.argmax(r[peaks] >= _PEAK_RATIO * best)]
        lag = lags[k] + _parabolic_offset(r[k - 1], r[k], r[k + 1])
        # the peak lag lies in the search range; refinement can only nudge it
        # past the edge by half a lag
        f0[t] = np.clip(fs / lag, cfg.f0_min, cfg.f0_max)
    out = smooth_f0(f0)
    # exp(log(x)) can land one ulp outside the range
    return np.clip(out, cfg.f0_min, cfg.f0_max)


def smooth_f0(f0: np.ndarray, min_run: int = _MIN_RUN,
              width: int = _MEDIAN_WIDTH) -> np.ndarray:
    """Drop short voiced runs, then clean up log F0 within each run.

    Frames far from their local median are replaced by it, and the run is
    median-filtered over ``width`` frames.
    """
    f0 = np.array(f0, dtype=np.float64)
    v = np.concatenate([[False], np.isfinite(f0), [False]])
    edges = np.flatnonzero(v[1:] != v[:-1])
    for s, e in zip(edges[::2], edges[1::2]):
        if e - s < min_run:
            f0[s:e] = np.nan
            continue
        lf = _fix_outliers(np.log(f0[s:e]))
        if width > 1:
            lf = median_filter(lf, size=width, mode="reflect")
        f0[s:e] = np.exp(lf)
    return f0


def _fix_outliers(lf: np.ndarray) -> np.ndarray:
    # windows are clipped rather than padded, so a pair of bad frames at a run
    # edge is still outvoted by the frames behind it
    n = lf.shape[0]
    ref = np.array([np.median(lf[max(0, i - _OUTLIER_REACH):i + _OUTLIER_REACH + 1])
                    for i in range(n)])
    bad = np.abs(lf - ref) > np.log(_OUTLIER_RATIO)
    return np.where(bad, ref, lf)


def f0_to_log(f0_hz: np.ndarray) -> np.ndarray:
    """Natural log of voiced F0 values, NaN preserved for unvoiced frames."""
    f0_hz = np.asarray(f0_hz, dtype=np.float64)
    out = np.full_like(f0_hz, np.nan)
    voiced = np.isfinite(f0_hz) & (f0_hz > 0)
    out[voiced] = np.log(f0_hz[voiced])
    return out
