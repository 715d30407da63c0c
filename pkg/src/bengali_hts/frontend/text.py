"""POS-tagged text input to annotated utterances.

One utterance per line::

    type=yesno-question tumi/PRON *kal/NN ascho/VF | ...

Tokens are ``orthography/POS``; ``|`` separates phrases and a leading ``*``
marks the focused word. An orthography written as ``{k.O.l.O.m}`` gives the
phonemes directly and bypasses G2P. ``PUNC`` tokens are dropped.
"""

from __future__ import annotations

from .annotation import (
    Pause,
    PhraseAnnotation,
    SentenceType,
    Syllable,
    UtteranceAnnotation,
    WordToken,
)
from .g2p import G2PRuleTable, g2p
from .inventory import lookup
from .prosody import assign_stress, assign_tones, mark_prosodic_words
from .syllabify import syllabify

NONFINAL_ENDTONE = "L-H%"


class TaggedTextError(ValueError):
    pass


def _phonemes_for(orth: str, rules: G2PRuleTable | None) -> list[str]:
    if orth.startswith("{") and orth.endswith("}"):
        phones = [p for p in orth[1:-1].replace("-", ".").split(".") if p]
        for p in phones:
            lookup(p)
        return phones
    return g2p(orth, rules)


def make_word(orth: str, pos: str, rules: G2PRuleTable | None = None,
              focus: bool = False) -> WordToken:
    phones = _phonemes_for(orth, rules)
    word = WordToken(orth, pos, hyphenated="-" in orth.strip("-{}"), phonemes=phones,
                     focus=focus)
    word.syllables = [Syllable(s) for s in syllabify(phones)]
    return word


def parse_tagged_line(line: str, utt_id: str = "utt",
                      rules: G2PRuleTable | None = None) -> UtteranceAnnotation:
    tokens = line.split()
    if not tokens or not tokens[0].startswith("type="):
        raise TaggedTextError("line must start with a type=<SentenceType> directive")
    try:
        stype = SentenceType.parse(tokens[0][len("type="):])
    except ValueError as exc:
        raise TaggedTextError(str(exc)) from None
    words: list[WordToken] = []
    starts: list[int] = []
    for tok in tokens[1:]:
        if tok == "|":
            if words and (not starts or starts[-1] != len(words)):
                starts.append(len(words))
            continue
        focus = tok.startswith("*")
        tok = tok.lstrip("*")
        if "/" not in tok:
            raise TaggedTextError(f"token {tok!r} is not orthography/POS")
        orth, pos = tok.rsplit("/", 1)
        if pos == "PUNC":
            continue
        try:
            words.append(make_word(orth, pos, rules, focus))
        except ValueError as exc:
            raise TaggedTextError(f"token {tok!r}: {exc}") from None
    if not words:
        raise TaggedTextError("no words in utterance")
    return annotate_words(utt_id, stype, words, [s for s in starts if s < len(words)])


def annotate_words(utt_id: str, stype: SentenceType, words: list[WordToken],
                   phrase_starts: list[int]) -> UtteranceAnnotation:
    """Group words, place stress and tones, and wrap the result in pauses."""
    pws = mark_prosodic_words(words, phrase_starts)
    for pw in pws:
        assign_stress(pw)
    focus = next((k for k, pw in enumerate(pws) if any(w.focus for w in pw.words)), None)
    tones, endtone = assign_tones(stype, len(pws), focus)
    for pw, tone in zip(pws, tones):
        pw.tone = tone
    bounds = set(phrase_starts)
    phrases: list[list] = [[]]
    seen = 0
    for pw in pws:
        if seen in bounds and phrases[-1]:
            phrases.append([])
        phrases[-1].append(pw)
        seen += len(pw.words)
    annotated = [PhraseAnnotation(p, NONFINAL_ENDTONE) for p in phrases]
    annotated[-1].endtone = endtone
    return UtteranceAnnotation(utt_id, stype, annotated,
                               pauses=[Pause(0), Pause(len(annotated))])


def parse_tagged_text(text: str, rules: G2PRuleTable | None = None,
                      prefix: str = "utt") -> list[UtteranceAnnotation]:
    out = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            out.append(parse_tagged_line(line, f"{prefix}{len(out) + 1:04d}", rules))
        except TaggedTextError as exc:
            raise TaggedTextError(f"line {n}: {exc}") from None
    return out
