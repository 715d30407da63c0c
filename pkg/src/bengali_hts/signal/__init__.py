"""Waveform-domain processing: analysis, excitation and MLSA synthesis."""

from .analysis import (
    AnalysisConfig,
    frame_signal,
    freqt,
    mel_cepstral_analysis,
    mel_cepstrogram,
    n_frames,
)
from .audio import Waveform, read_wav, write_wav
from .deltas import DeltaWindows, compute_deltas, window_matrix
from .excitation import generate_excitation
from .mlsa import (
    MLSAFilter,
    b2mc,
    mc2b,
    mel_log_spectrum,
    mlsa_synthesize,
    pade_coefficients,
)
from .pitch import estimate_f0, f0_to_log

__all__ = [
    "AnalysisConfig",
    "DeltaWindows",
    "MLSAFilter",
    "Waveform",
    "b2mc",
    "compute_deltas",
    "estimate_f0",
    "f0_to_log",
    "frame_signal",
    "freqt",
    "generate_excitation",
    "mc2b",
    "mel_cepstral_analysis",
    "mel_cepstrogram",
    "mel_log_spectrum",
    "mlsa_synthesize",
    "n_frames",
    "pade_coefficients",
    "read_wav",
    "window_matrix",
    "write_wav",
]
