"""Text or labels to waveform."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..frontend.annotation import UtteranceAnnotation
from ..frontend.labels import ContextLabel, build_context_labels
from ..frontend.text import parse_tagged_line
from ..model.modelset import ModelSet
from ..signal.audio import Waveform
from ..signal.excitation import generate_excitation
from ..signal.mlsa import mc2b, mlsa_synthesize
from ..training.observations import voiced_segments
from .chain import (
    StateChain,
    decide_voicing,
    determine_durations,
    durations_for_phones,
    labels_to_chain,
)
from .gv import apply_gv
from .mlpg import mlpg


@dataclass(frozen=True)
class SynthesisConfig:
    """``target_frames`` fixes the total length; ``gv_weight`` 0 disables GV."""

    target_frames: int | None = None
    gv_weight: float = 0.0
    gv_step: float = 0.01
    gv_iterations: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.target_frames is not None and self.target_frames < 1:
            raise ValueError("target_frames must be positive")
        if self.gv_weight < 0:
            raise ValueError("gv_weight must be >= 0")
        if self.gv_iterations < 0:
            raise ValueError("gv_iterations must be >= 0")


@dataclass
class SynthesisResult:
    labels: list[ContextLabel]
    durations: np.ndarray
    voiced: np.ndarray
    mcep: np.ndarray
    lf0: np.ndarray
    waveform: Waveform = field(repr=False)

    @property
    def f0_hz(self) -> np.ndarray:
        """F0 per frame, NaN where unvoiced."""
        return np.where(self.voiced, np.exp(np.nan_to_num(self.lf0)), np.nan)


def expand(chain_values: np.ndarray, durations) -> np.ndarray:
    return np.repeat(chain_values, np.asarray(durations, dtype=np.int64), axis=0)


def generate_parameters(chain: StateChain, durations, models: ModelSet,
                        voiced: np.ndarray | None = None, return_bands: bool = False):
    """ML static trajectories: ``(mcep (T, M+1), lf0 (T,) NaN where unvoiced)``."""
    windows = models.windows
    mcep, bands = mlpg(expand(chain.spec_mean, durations), expand(chain.spec_var, durations),
                       windows, return_band=True)
    if voiced is None:
        voiced = decide_voicing(chain, durations)
    lm, lv = expand(chain.lf0_mean, durations), expand(chain.lf0_var, durations)
    lf0 = np.full(mcep.shape[0], np.nan)
    for s, e in voiced_segments(voiced):
        lf0[s:e] = mlpg(lm[s:e], lv[s:e], windows)[:, 0]
    return (mcep, lf0, bands) if return_bands else (mcep, lf0)


def to_labels(source) -> list[ContextLabel]:
    if isinstance(source, str):
        lines = [ln for ln in source.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty text")
        if len(lines) > 1:
            raise ValueError("synthesize one utterance at a time")
        source = parse_tagged_line(lines[0])
    if isinstance(source, UtteranceAnnotation):
        return build_context_labels(source)
    labels = list(source)
    if not labels:
        raise ValueError("no labels to synthesize")
    return labels


def synth_utterance(source, models: ModelSet, cfg: SynthesisConfig = SynthesisConfig(),
                    phone_frames: Sequence[int] | None = None) -> SynthesisResult:
    """Synthesize tagged text, an annotation or a label sequence.

    ``phone_frames`` (one count per label) imposes given phone durations;
    each phone's state durations then follow the target-length rule.
    """
    labels = to_labels(source)
    chain = labels_to_chain(labels, models)
    if phone_frames is not None:
        durations = durations_for_phones(chain, phone_frames)
    else:
        durations = determine_durations(chain, target_frames=cfg.target_frames)
    voiced = decide_voicing(chain, durations)
    mcep, lf0, bands = generate_parameters(chain, durations, models, voiced, return_bands=True)
    if cfg.gv_weight > 0 and models.gv is not None:
        mcep = apply_gv(mcep, models.gv, cfg.gv_weight, cfg.gv_step, cfg.gv_iterations, bands)
    acfg = models.config
    f0 = np.where(voiced, np.exp(np.nan_to_num(lf0)), np.nan)
    exc = generate_excitation(f0, acfg, cfg.seed)
    wav = mlsa_synthesize(mc2b(mcep, acfg.alpha), exc, acfg.alpha, acfg)
    return SynthesisResult(labels, durations, voiced, mcep, lf0, wav)


def write_trajectory_csv(result: SynthesisResult, path) -> None:
    """Columns ``frame, c0..cM, f0_hz_or_0, voiced``."""
    M = result.mcep.shape[1] - 1
    f0 = np.nan_to_num(result.f0_hz, nan=0.0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", *(f"c{m}" for m in range(M + 1)), "f0_hz_or_0", "voiced"])
        for t in range(result.mcep.shape[0]):
            w.writerow([t, *(repr(float(v)) for v in result.mcep[t]), repr(float(f0[t])),
                        int(result.voiced[t])])
