"""Observation vectors for the two streams and per-utterance training records."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..frontend.labels import ContextLabel
from ..signal.analysis import AnalysisConfig
from ..signal.deltas import DeltaWindows, compute_deltas


@dataclass
class ObservationSequence:
    """``spectrum`` is ``(T, 3 * (M + 1))``; ``lf0`` is ``(T, 3)``.

    ``lf0`` rows are only meaningful where ``voiced``.
    """

    spectrum: np.ndarray
    lf0: np.ndarray
    voiced: np.ndarray

    def __len__(self):
        return self.spectrum.shape[0]


def voiced_segments(voiced: np.ndarray) -> list[tuple[int, int]]:
    """Half-open ``[start, end)`` runs of True."""
    v = np.concatenate([[False], np.asarray(voiced, dtype=bool), [False]])
    edges = np.flatnonzero(v[1:] != v[:-1])
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def lf0_with_deltas(lf0: np.ndarray, windows: DeltaWindows = DeltaWindows()):
    """logF0 with dynamic features computed inside each voiced segment.

    ``lf0`` holds NaN on unvoiced frames. Returns ``(obs, voiced)`` where
    unvoiced rows of ``obs`` are zero.
    """
    lf0 = np.asarray(lf0, dtype=np.float64)
    voiced = np.isfinite(lf0)
    out = np.zeros((lf0.shape[0], len(windows)))
    for s, e in voiced_segments(voiced):
        out[s:e] = compute_deltas(lf0[s:e], windows)
    return out, voiced


def build_observations(mcep: np.ndarray, lf0: np.ndarray,
                       windows: DeltaWindows = DeltaWindows()) -> ObservationSequence:
    mcep = np.asarray(mcep, dtype=np.float64)
    if mcep.ndim != 2 or mcep.shape[0] != np.shape(lf0)[0]:
        raise ValueError("mel-cepstra and logF0 must cover the same frames")
    exc, voiced = lf0_with_deltas(lf0, windows)
    return ObservationSequence(compute_deltas(mcep, windows), exc, voiced)


def phone_frame_spans(times: Sequence[tuple[float, float]], n_frames: int,
                      cfg: AnalysisConfig = AnalysisConfig()) -> list[tuple[int, int]]:
    """Frames belonging to each phone, by frame-centre time.

    Frame ``t`` is centred at sample ``t * shift + length / 2``; it belongs to
    the phone whose ``[start, end)`` interval contains that time.
    """
    centres = (np.arange(n_frames) * cfg.frame_shift + cfg.frame_length / 2) / cfg.sample_rate
    spans = []
    for start, end in times:
        lo = int(np.searchsorted(centres, start - 1e-9, side="left"))
        hi = int(np.searchsorted(centres, end - 1e-9, side="left"))
        spans.append((lo, hi))
    return spans


@dataclass
class TrainingUtterance:
    """Everything the trainer needs about one utterance."""

    id: str
    labels: list[ContextLabel]
    obs: ObservationSequence
    mcep: np.ndarray
    spans: list[tuple[int, int]] | None = None

    def __post_init__(self):
        if self.spans is not None and len(self.spans) != len(self.labels):
            raise ValueError(f"{self.id}: {len(self.spans)} phone spans for "
                             f"{len(self.labels)} labels")

    @property
    def n_frames(self) -> int:
        return len(self.obs)
