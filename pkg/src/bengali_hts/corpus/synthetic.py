"""A deterministic simulated speaker and the mini-corpus it records.

Each phone has a fixed target mel-cepstrum and duration; F0 is constant
within a prosodic word and steps down word by word in declaratives and up
in yes/no questions. Audio goes through the package's own pulse/noise
excitation and MLSA filter, so training should be able to recover the
planted parameters.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ..frontend.annotation import SentenceType, UtteranceAnnotation
from ..frontend.inventory import SILENCE, lookup
from ..frontend.labels import ContextLabel, build_context_labels
from ..frontend.text import annotate_words, make_word
from ..signal.analysis import AnalysisConfig
from ..signal.audio import Waveform, write_wav
from ..signal.excitation import generate_excitation
from ..signal.mlsa import mc2b, mlsa_synthesize
from .utt_format import format_annotation

DEFAULT_PHONES = ("a", "i", "u", "e", "o", "O", "m", "n", "l", "r", "b", "d", "g",
                  "k", "t", "s")
DECLARATIVE_TYPES = (SentenceType.SIMPLE_AFFIRMATIVE_VERB, SentenceType.SIMPLE_NEGATIVE,
                     SentenceType.COMPLEX_AFFIRMATIVE, SentenceType.IMPERATIVE)
WORD_POS = ("NN", "NN", "VF", "ADJ", "PRON", "ADV", "NNP")
SILENCE_C0 = -14.0  # quiet enough to quantise to digital zero
EDGE_SILENCE = 20   # frames


@dataclass(frozen=True)
class SimulatedSpeaker:
    """Planted acoustic parameters for a set of phones."""

    phones: tuple = DEFAULT_PHONES
    seed: int = 0
    order: int = 24

    def __post_init__(self):
        for p in self.phones:
            if lookup(p).cls == "silence":
                raise ValueError("silence is always part of the speaker")

    @cached_property
    def targets(self) -> dict[str, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        m = np.arange(1, self.order + 1)
        out = {}
        for p in self.phones:
            c = np.empty(self.order + 1)
            c[0] = rng.uniform(-4.0, -3.3)
            c[1:] = np.clip(rng.normal(0.0, 0.5 / m), -0.5, 0.5)
            out[p] = c
        sil = np.zeros(self.order + 1)
        sil[0] = SILENCE_C0
        out[SILENCE] = sil
        return out

    def mcep(self, phone: str) -> np.ndarray:
        return self.targets[phone]

    @staticmethod
    def duration(label: ContextLabel) -> int:
        ph = lookup(label.p3)
        if ph.cls == "silence":
            return EDGE_SILENCE
        if ph.is_vowel:
            return 12 if label.sstr_c == 1 else 10
        return 6 if ph.voiced else 7

    @staticmethod
    def f0(label: ContextLabel) -> float:
        """Planted F0 in Hz, NaN for unvoiced phones."""
        ph = lookup(label.p3)
        if ph.cls == "silence" or not ph.voiced:
            return float("nan")
        k = (label.wpp or 1) - 1
        if label.ftone == "H-H%":
            return 110.0 + 10.0 * k
        return max(140.0 - 10.0 * k, 90.0)


@dataclass
class RenderedUtterance:
    annotation: UtteranceAnnotation
    labels: list[ContextLabel]
    durations: list[int]
    mcep: np.ndarray
    f0: np.ndarray
    waveform: Waveform = field(repr=False)


def _lexicon(rng, phones: Sequence[str], n_words: int = 40) -> list[tuple[str, str]]:
    vowels = [p for p in phones if lookup(p).is_vowel]
    cons = [p for p in phones if not lookup(p).is_vowel]
    if not vowels:
        raise ValueError("the phone set needs at least one vowel")
    words = []
    for _ in range(n_words):
        syls = []
        for _ in range(int(rng.integers(1, 3))):
            syl = [] if not cons else [cons[int(rng.integers(len(cons)))]]
            syl.append(vowels[int(rng.integers(len(vowels)))])
            if cons and rng.random() < 0.25:
                syl.append(cons[int(rng.integers(len(cons)))])
            syls.append(syl)
        phon = "{" + ".".join(p for s in syls for p in s) + "}"
        words.append((phon, WORD_POS[int(rng.integers(len(WORD_POS)))]))
    return words


def _set_times(utt: UtteranceAnnotation, durations: Sequence[int], frame_sec: float) -> None:
    bounds = np.concatenate([[0], np.cumsum(durations)])
    k = 0

    def span(n):
        s, e = round(bounds[k] * frame_sec, 4), round(bounds[k + n] * frame_sec, 4)
        return s, e

    for seg in utt.segments():
        if not hasattr(seg, "prosodic_words"):
            seg.start, seg.end = span(1)
            k += 1
            continue
        n_phr = sum(len(s.phonemes) for s in seg.syllables)
        seg.start, seg.end = span(n_phr)
        for pw in seg.prosodic_words:
            n_pw = sum(len(s.phonemes) for s in pw.syllables)
            pw.start, pw.end = span(n_pw)
            for syl in pw.syllables:
                syl.start, syl.end = span(len(syl.phonemes))
                syl.phone_times = []
                for _ in syl.phonemes:
                    syl.phone_times.append(span(1))
                    k += 1


def make_sentence(rng, lexicon, uid: str) -> UtteranceAnnotation:
    n = int(rng.integers(3, 6))
    words = [make_word(*lexicon[int(rng.integers(len(lexicon)))]) for _ in range(n)]
    if rng.random() < 0.4:
        stype = SentenceType.YESNO_QUESTION
    else:
        stype = DECLARATIVE_TYPES[int(rng.integers(len(DECLARATIVE_TYPES)))]
    return annotate_words(uid, stype, words, [])


def render(utt: UtteranceAnnotation, speaker: SimulatedSpeaker,
           cfg: AnalysisConfig = AnalysisConfig(), seed: int = 0) -> RenderedUtterance:
    """Assign planted durations/parameters to ``utt`` (times set in place) and synthesize it."""
    labels = build_context_labels(utt)
    durations = [speaker.duration(lab) for lab in labels]
    _set_times(utt, durations, cfg.frame_shift / cfg.sample_rate)
    mcep = np.concatenate([np.tile(speaker.mcep(lab.p3), (d, 1))
                           for lab, d in zip(labels, durations)])
    f0 = np.concatenate([np.full(d, speaker.f0(lab)) for lab, d in zip(labels, durations)])
    exc = generate_excitation(f0, cfg, seed)
    wav = mlsa_synthesize(mc2b(mcep, cfg.alpha), exc, cfg.alpha, cfg)
    return RenderedUtterance(utt, labels, durations, mcep, f0, wav)


def synthetic_utterances(n: int, seed: int = 7, phones: Sequence[str] | None = None,
                         speaker: SimulatedSpeaker | None = None,
                         cfg: AnalysisConfig = AnalysisConfig()) -> list[RenderedUtterance]:
    if n < 1:
        raise ValueError("n must be >= 1")
    speaker = speaker or SimulatedSpeaker(tuple(phones or DEFAULT_PHONES), order=cfg.order)
    rng = np.random.default_rng(seed)
    lexicon = _lexicon(rng, speaker.phones)
    out = []
    for i in range(n):
        utt = make_sentence(rng, lexicon, f"syn{i + 1:04d}")
        out.append(render(utt, speaker, cfg, seed=seed * 100_003 + i))
    return out


def generate_synthetic_corpus(root, n: int = 20, seed: int = 7,
                              phones: Sequence[str] | None = None,
                              cfg: AnalysisConfig = AnalysisConfig()) -> list[str]:
    """Write ``wav/`` and ``utt/`` for ``n`` synthetic utterances; returns their ids."""
    root = Path(root)
    (root / "wav").mkdir(parents=True, exist_ok=True)
    (root / "utt").mkdir(parents=True, exist_ok=True)
    ids = []
    for r in synthetic_utterances(n, seed, phones, cfg=cfg):
        uid = r.annotation.id
        write_wav(root / "wav" / f"{uid}.wav", r.waveform)
        (root / "utt" / f"{uid}.utt").write_text(format_annotation(r.annotation),
                                                 encoding="utf-8")
        ids.append(uid)
    return ids
