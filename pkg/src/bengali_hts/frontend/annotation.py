"""Hierarchical utterance annotation: phrase > prosodic word > word > syllable > phoneme."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .inventory import SILENCE


class SentenceType(str, Enum):
    COMPLEX_AFFIRMATIVE = "complex-affirmative"
    COMPLEX_NEGATIVE = "complex-negative"
    SIMPLE_AFFIRMATIVE_VERB = "simple-affirmative-verb"
    SIMPLE_AFFIRMATIVE_NOVERB = "simple-affirmative-noverb"
    SIMPLE_NEGATIVE = "simple-negative"
    COMPOUND_AFFIRMATIVE = "compound-affirmative"
    COMPOUND_NEGATIVE = "compound-negative"
    EXCLAMATORY = "exclamatory"
    IMPERATIVE = "imperative"
    PASSIVE = "passive"
    WH_QUESTION = "wh-question"
    YESNO_QUESTION = "yesno-question"

    @classmethod
    def parse(cls, text: str) -> "SentenceType":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown sentence type {text!r}") from None


POS_TAGS = ("NN", "NNP", "VF", "VAUX", "VN", "ADJ", "ADV", "PP", "PRT", "PRON",
            "CONJ", "NUM", "PUNC")
CONTENT_POS = frozenset({"NN", "NNP", "VF", "VAUX", "VN", "ADJ", "ADV"})
ENDTONES = ("L-L%", "H-H%", "L-H%", "H-L%")
WORD_TONES = ("rising", "low")


@dataclass
class Syllable:
    phonemes: list[str]
    stressed: bool = False
    start: float | None = None
    end: float | None = None
    phone_times: list[tuple[float, float]] | None = None


@dataclass
class WordToken:
    orthography: str
    pos: str
    hyphenated: bool = False
    phonemes: list[str] = field(default_factory=list)
    syllables: list[Syllable] = field(default_factory=list)
    focus: bool = False

    def __post_init__(self):
        if self.pos not in POS_TAGS:
            raise ValueError(f"unknown POS tag {self.pos!r}")

    @property
    def n_syllables(self) -> int:
        return len(self.syllables)


@dataclass
class ProsodicWord:
    words: list[WordToken]
    tone: str | None = None
    stress_syllable: int = 0
    start: float | None = None
    end: float | None = None

    def __post_init__(self):
        if not self.words:
            raise ValueError("a prosodic word needs at least one word")

    @property
    def syllables(self) -> list[Syllable]:
        return [s for w in self.words for s in w.syllables]

    @property
    def pos(self) -> str:
        return self.words[0].pos

    @property
    def is_content(self) -> bool:
        return self.pos in CONTENT_POS


@dataclass
class PhraseAnnotation:
    prosodic_words: list[ProsodicWord]
    endtone: str | None = None
    start: float | None = None
    end: float | None = None

    def __post_init__(self):
        if not self.prosodic_words:
            raise ValueError("a phrase needs at least one prosodic word")

    @property
    def syllables(self) -> list[Syllable]:
        return [s for pw in self.prosodic_words for s in pw.syllables]


@dataclass
class Pause:
    """A silence segment placed before phrase ``position`` (``len(phrases)`` = trailing)."""

    position: int
    start: float | None = None
    end: float | None = None


@dataclass
class UtteranceAnnotation:
    id: str
    sentence_type: SentenceType
    phrases: list[PhraseAnnotation]
    pauses: list[Pause] = field(default_factory=list)

    def segments(self):
        """Yield phrases and pauses in temporal order."""
        for i, ph in enumerate(self.phrases):
            yield from (p for p in self.pauses if p.position == i)
            yield ph
        yield from (p for p in self.pauses if p.position == len(self.phrases))

    def phoneme_sequence(self) -> list[str]:
        out = []
        for seg in self.segments():
            if isinstance(seg, Pause):
                out.append(SILENCE)
            else:
                out.extend(p for syl in seg.syllables for p in syl.phonemes)
        return out

    def phone_times(self) -> list[tuple[float, float]] | None:
        """Per-phoneme (start, end) in seconds, or None if any layer lacks times."""
        out = []
        for seg in self.segments():
            if isinstance(seg, Pause):
                if seg.start is None or seg.end is None:
                    return None
                out.append((seg.start, seg.end))
                continue
            for syl in seg.syllables:
                if syl.phone_times is None:
                    return None
                out.extend(syl.phone_times)
        return out

    @property
    def n_syllables(self) -> int:
        return sum(len(ph.syllables) for ph in self.phrases)

    @property
    def n_words(self) -> int:
        return sum(len(ph.prosodic_words) for ph in self.phrases)
