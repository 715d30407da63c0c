"""Dynamic-feature windows shared by analysis and parameter generation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse


def _default_windows():
    return ((1.0,), (-0.5, 0.0, 0.5), (0.25, -0.5, 0.25))


@dataclass(frozen=True)
class DeltaWindows:
    """Static, delta and delta-delta regression windows (odd lengths, centred)."""

    windows: tuple = field(default_factory=_default_windows)

    def __post_init__(self):
        wins = tuple(tuple(float(v) for v in w) for w in self.windows)
        for w in wins:
            if len(w) % 2 != 1:
                raise ValueError(f"window {w} must have odd length")
        object.__setattr__(self, "windows", wins)

    def __len__(self):
        return len(self.windows)

    @property
    def max_half_width(self) -> int:
        return max(len(w) // 2 for w in self.windows)


def apply_window(x: np.ndarray, window) -> np.ndarray:
    """Correlate ``x`` (frames along axis 0) with a centred window, replicating edges."""
    x = np.asarray(x, dtype=np.float64)
    T = x.shape[0]
    h = len(window) // 2
    out = np.zeros_like(x)
    for j, w in enumerate(window):
        if w == 0.0:
            continue
        idx = np.clip(np.arange(T) + j - h, 0, T - 1)
        out += w * x[idx]
    return out


def compute_deltas(static: np.ndarray, windows: DeltaWindows = DeltaWindows()) -> np.ndarray:
    """Stack ``[static, delta, delta-delta]`` along the last axis.

    ``static`` has shape ``(T,)`` or ``(T, D)``; the result is ``(T, D * n_windows)``.
    """
    static = np.asarray(static, dtype=np.float64)
    if static.ndim == 1:
        static = static[:, None]
    if static.shape[0] < 1:
        raise ValueError("need at least one frame")
    return np.concatenate([apply_window(static, w) for w in windows.windows], axis=1)


def window_matrix(T: int, windows: DeltaWindows = DeltaWindows()) -> sparse.csr_matrix:
    """The ``(n_windows * T, T)`` matrix ``W`` with ``W @ c`` = stacked window outputs.

    Row ``k * T + t`` is window ``k`` at frame ``t``; edge replication folds
    out-of-range taps onto the first/last frame, matching :func:`apply_window`.
    """
    rows, cols, vals = [], [], []
    for k, win in enumerate(windows.windows):
        h = len(win) // 2
        for j, w in enumerate(win):
            if w == 0.0:
                continue
            t = np.arange(T)
            rows.append(k * T + t)
            cols.append(np.clip(t + j - h, 0, T - 1))
            vals.append(np.full(T, w))
    if not rows:
        return sparse.csr_matrix((len(windows) * T, T))
    return sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(windows) * T, T),
    ).tocsr()
