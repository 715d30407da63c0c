"""Prosodic-word grouping, stress placement and tone assignment."""

from __future__ import annotations

from collections.abc import Collection, Sequence

from .annotation import ProsodicWord, SentenceType, WordToken


def _pair_rule(a: WordToken, b: WordToken) -> int | None:
    """Number of the first grouping rule joining ``a`` and the following ``b``."""
    if b.hyphenated:
        return None
    if a.orthography and a.orthography == b.orthography:
        return 1
    if a.pos == "NNP" and b.pos == "NNP":
        return 2
    if a.pos == "ADJ" and b.pos == "NN" and a.n_syllables >= 3 and b.n_syllables >= 3:
        return 3
    if a.pos == "NN" and b.pos == "VN":
        return 4
    if b.pos == "PP":
        return 5
    if a.pos in ("VF", "VAUX") and b.pos == "PRT":
        return 6
    if a.pos == "VF" and b.pos == "VAUX":
        return 7
    if a.pos in ("NN", "ADJ", "VN") and b.pos == "VF":
        return 8
    return None


def mark_prosodic_words(words: Sequence[WordToken],
                        phrase_starts: Collection[int] = ()) -> list[ProsodicWord]:
    """Group tagged words into prosodic words.

    Scans left to right; at each word the grouping rules are tried in order
    against the next word, and the first that fires merges the pair. Each
    word joins exactly one prosodic word and no group crosses a phrase
    boundary (``phrase_starts`` lists indices of words that open a phrase).
    Hyphenated words always stand alone.
    """
    starts = set(phrase_starts)
    out: list[ProsodicWord] = []
    i = 0
    while i < len(words):
        a = words[i]
        rule = None
        if not a.hyphenated and i + 1 < len(words) and (i + 1) not in starts:
            rule = _pair_rule(a, words[i + 1])
        if rule is not None:
            out.append(ProsodicWord([a, words[i + 1]]))
            i += 2
        else:
            out.append(ProsodicWord([a]))
            i += 1
    return out


def grouping_rule(pw: ProsodicWord) -> int | None:
    """Which rule produced ``pw`` (1 for a hyphenated singleton), None for plain singletons."""
    if len(pw.words) == 2:
        return _pair_rule(pw.words[0], pw.words[1])
    if pw.words[0].hyphenated:
        return 1
    return None


def assign_stress(pw: ProsodicWord) -> int:
    """Stress falls on the first syllable of the prosodic word; flags are set in place."""
    for k, syl in enumerate(pw.syllables):
        syl.stressed = k == 0
    pw.stress_syllable = 0
    return 0


def assign_tones(sentence_type: SentenceType, n_words: int,
                 focus_index: int | None = None) -> tuple[list[str], str]:
    """Per-prosodic-word tones and the utterance-final phrase endtone.

    Declaratives rise on every word but the last, which is low (L-L%).
    Yes-no questions rise throughout (H-H%). WH questions and sentences with
    a focused word rise up to and including the focus and are low after it
    (L-L%); a WH question without a marked focus follows the declarative
    pattern.
    """
    sentence_type = SentenceType(sentence_type)
    if n_words < 1:
        raise ValueError("need at least one prosodic word")
    if focus_index is not None and not 0 <= focus_index < n_words:
        raise ValueError(f"focus index {focus_index} out of range for {n_words} words")
    if sentence_type is SentenceType.YESNO_QUESTION:
        return ["rising"] * n_words, "H-H%"
    if focus_index is not None:
        tones = ["rising" if k <= focus_index else "low" for k in range(n_words)]
        return tones, "L-L%"
    return ["rising"] * (n_words - 1) + ["low"], "L-L%"
