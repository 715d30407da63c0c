"""Corpus directories: ``wav/<id>.wav`` next to ``utt/<id>.utt``."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

from ..frontend.annotation import UtteranceAnnotation
from ..signal.analysis import AnalysisConfig
from .utt_format import RESOLUTION, AnnotationFormatError, parse_annotation


class CorpusError(ValueError):
    pass


@dataclass
class CorpusEntry:
    id: str
    wav_path: Path
    annotation: UtteranceAnnotation


def _wav_info(path: Path) -> tuple[int, float]:
    try:
        with wave.open(str(path), "rb") as w:
            return w.getframerate(), w.getnframes() / w.getframerate()
    except (wave.Error, EOFError) as exc:
        raise CorpusError(f"{path.stem}: unreadable WAV: {exc}") from None


def _last_time(utt: UtteranceAnnotation) -> float:
    ends = [seg.end for seg in utt.segments() if seg.end is not None]
    return max(ends, default=0.0)


def load_entry(utt_path: Path, wav_path: Path, cfg: AnalysisConfig) -> CorpusEntry:
    uid = utt_path.stem
    try:
        ann = parse_annotation(utt_path.read_text(encoding="utf-8"))
    except AnnotationFormatError as exc:
        raise CorpusError(f"{utt_path.name}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise CorpusError(f"{utt_path.name}: not UTF-8 ({exc.reason})") from None
    if ann.id != uid:
        raise CorpusError(f"{utt_path.name}: UTT id {ann.id!r} does not match file name")
    if ann.phone_times() is None:
        raise CorpusError(f"{utt_path.name}: annotation lacks phone times")
    rate, duration = _wav_info(wav_path)
    if rate != cfg.sample_rate:
        raise CorpusError(f"{uid}: sample-rate mismatch ({rate} Hz, expected {cfg.sample_rate} Hz)")
    if _last_time(ann) > duration + RESOLUTION:
        raise CorpusError(f"{uid}: annotation ends at {_last_time(ann):.4f} s, "
                          f"after the audio ({duration:.4f} s)")
    return CorpusEntry(uid, wav_path, ann)


def load_corpus(root, cfg: AnalysisConfig = AnalysisConfig()) -> list[CorpusEntry]:
    """Validated entries sorted by id."""
    root = Path(root)
    wav_dir, utt_dir = root / "wav", root / "utt"
    for d in (wav_dir, utt_dir):
        if not d.is_dir():
            raise CorpusError(f"missing directory {d}")
    utts = {p.stem: p for p in utt_dir.glob("*.utt")}
    wavs = {p.stem: p for p in wav_dir.glob("*.wav")}
    no_wav = sorted(utts.keys() - wavs.keys())
    if no_wav:
        raise CorpusError(f"{no_wav[0]}: annotation without WAV")
    no_utt = sorted(wavs.keys() - utts.keys())
    if no_utt:
        raise CorpusError(f"{no_utt[0]}: WAV without annotation")
    if not utts:
        raise CorpusError(f"no utterances under {root}")
    return [load_entry(utts[uid], wavs[uid], cfg) for uid in sorted(utts)]
