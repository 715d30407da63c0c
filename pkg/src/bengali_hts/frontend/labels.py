"""Full-context labels: construction from annotations and text serialization."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

from .annotation import ENDTONES, POS_TAGS, Pause, UtteranceAnnotation
from .inventory import SENTINEL, SILENCE, phoneme_table

PHONE_KEYS = ("p1", "p2", "p3", "p4", "p5")
# categorical fields besides the quinphone, with their value domains
CATEGORICAL_DOMAINS = {
    "wpos_p": POS_TAGS, "wpos_c": POS_TAGS, "wpos_n": POS_TAGS,
    "ftone": ENDTONES,
}
BINARY_KEYS = ("sstr_p", "sstr_c", "sstr_n")
# (position field, matching count field)
POSITION_BOUNDS = (("pp", "sph_c"), ("ps", "sph_c"), ("spw", "wsy_c"),
                   ("wpp", "fw_c"), ("fpu", "up"))


class LabelParseError(ValueError):
    pass


class AnnotationLayerError(ValueError):
    pass


@dataclass(frozen=True)
class ContextLabel:
    """One phoneme with its phoneme/syllable/word/phrase/utterance context.

    String fields use ``"x"`` outside the valid range; integer fields use
    ``None`` (serialized as ``x``) for undefined positions/flags and ``0``
    for absent counts.
    """

    p1: str
    p2: str
    p3: str
    p4: str
    p5: str
    pp: int | None = None
    ps: int | None = None
    sstr_p: int | None = None
    sstr_c: int | None = None
    sstr_n: int | None = None
    sph_p: int = 0
    sph_c: int = 0
    sph_n: int = 0
    spw: int | None = None
    ssb: int = 0
    ssa: int = 0
    sds: int = 0
    sns: int = 0
    wpos_p: str = SENTINEL
    wpos_c: str = SENTINEL
    wpos_n: str = SENTINEL
    wsy_p: int = 0
    wsy_c: int = 0
    wsy_n: int = 0
    wpp: int | None = None
    wcb: int = 0
    wca: int = 0
    wdc: int = 0
    wnc: int = 0
    fsy_p: int = 0
    fsy_c: int = 0
    fsy_n: int = 0
    fw_p: int = 0
    fw_c: int = 0
    fw_n: int = 0
    fpu: int | None = None
    ftone: str = SENTINEL
    usy: int = 0
    uw: int = 0
    up: int = 0

    @property
    def phoneme(self) -> str:
        return self.p3

    def __str__(self):
        return format_label(self)


LABEL_KEYS = tuple(f.name for f in fields(ContextLabel))
STRING_KEYS = frozenset(PHONE_KEYS) | frozenset(CATEGORICAL_DOMAINS)
NUMERIC_KEYS = tuple(k for k in LABEL_KEYS if k not in STRING_KEYS)


def _fmt(v) -> str:
    return SENTINEL if v is None else str(v)


def format_label(label: ContextLabel) -> str:
    return "/".join(f"{k}={_fmt(v)}" for k, v in zip(LABEL_KEYS, astuple(label)))


def parse_label(text: str) -> ContextLabel:
    """Inverse of :func:`format_label`; fields must appear in the fixed order."""
    parts = text.strip().split("/")
    values = {}
    offset = 0
    phones = phoneme_table()
    for idx, part in enumerate(parts):
        where = f"field {idx + 1} (char {offset})"
        offset += len(part) + 1
        if "=" not in part:
            raise LabelParseError(f"{where}: expected key=value, got {part!r}")
        key, raw = part.split("=", 1)
        if key not in LABEL_KEYS:
            raise LabelParseError(f"{where}: unknown key {key!r}")
        if idx >= len(LABEL_KEYS) or key != LABEL_KEYS[idx]:
            expected = LABEL_KEYS[idx] if idx < len(LABEL_KEYS) else "end of label"
            raise LabelParseError(f"{where}: expected {expected!r}, got {key!r}")
        if key in PHONE_KEYS:
            if raw != SENTINEL and raw not in phones:
                raise LabelParseError(f"{where}: unknown phoneme {raw!r}")
            values[key] = raw
        elif key in CATEGORICAL_DOMAINS:
            if raw != SENTINEL and raw not in CATEGORICAL_DOMAINS[key]:
                raise LabelParseError(f"{where}: bad value {raw!r} for {key}")
            values[key] = raw
        elif raw == SENTINEL:
            values[key] = None
        else:
            if not (raw.isascii() and raw.isdigit()):
                raise LabelParseError(f"{where}: malformed integer {raw!r} for {key}")
            values[key] = int(raw)
    missing = [k for k in LABEL_KEYS if k not in values]
    if missing:
        raise LabelParseError(f"missing key {missing[0]!r}")
    return ContextLabel(**values)


def _require(utt: UtteranceAnnotation) -> None:
    if not utt.phrases:
        raise AnnotationLayerError("missing annotation layer: phrases")
    for ph in utt.phrases:
        if ph.endtone is None:
            raise AnnotationLayerError("missing annotation layer: phrase endtone")
        for pw in ph.prosodic_words:
            for w in pw.words:
                if not w.syllables:
                    raise AnnotationLayerError(
                        f"missing annotation layer: syllables of word {w.orthography!r}")
                for syl in w.syllables:
                    if not syl.phonemes:
                        raise AnnotationLayerError("missing annotation layer: phonemes")


def build_context_labels(utt: UtteranceAnnotation) -> list[ContextLabel]:
    """One label per phoneme (pauses included), in temporal order."""
    _require(utt)
    phrases = utt.phrases
    pws = [(fi, wi, pw) for fi, ph in enumerate(phrases)
           for wi, pw in enumerate(ph.prosodic_words)]
    syls = [(gw, si, syl) for gw, (_, _, pw) in enumerate(pws)
            for si, syl in enumerate(pw.syllables)]
    stressed_idx = [gs for gs, (_, _, syl) in enumerate(syls) if syl.stressed]
    content_idx = [gw for gw, (_, _, pw) in enumerate(pws) if pw.is_content]
    phrase_syl = [len(ph.syllables) for ph in phrases]
    phrase_words = [len(ph.prosodic_words) for ph in phrases]
    usy, uw, up = sum(phrase_syl), len(pws), len(phrases)

    # one entry per phoneme: (symbol, global syllable index or None, index within syllable)
    seq: list[tuple[str, int | None, int]] = []
    gs = 0
    for seg in utt.segments():
        if isinstance(seg, Pause):
            seq.append((SILENCE, None, 0))
            continue
        for syl in seg.syllables:
            seq.extend((p, gs, j) for j, p in enumerate(syl.phonemes))
            gs += 1
    symbols = [s for s, _, _ in seq]

    def at(i):
        return symbols[i] if 0 <= i < len(symbols) else SENTINEL

    def first(items, pred):
        return next((x for x in items if pred(x)), None)

    labels = []
    for i, (sym, g, j) in enumerate(seq):
        quin = dict(p1=at(i - 2), p2=at(i - 1), p3=sym, p4=at(i + 1), p5=at(i + 2))
        if g is None:
            labels.append(ContextLabel(**quin, usy=usy, uw=uw, up=up))
            continue
        gw, si, syl = syls[g]
        fi, wi, pw = pws[gw]
        prev_syl = syls[g - 1][2] if g > 0 else None
        next_syl = syls[g + 1][2] if g + 1 < len(syls) else None
        in_phrase = [k for k, (w, _, _) in enumerate(syls) if pws[w][0] == fi]
        prev_st = first(reversed(stressed_idx), lambda k, g=g: k < g)
        next_st = first(stressed_idx, lambda k, g=g: k > g)
        phrase_pw = [k for k, (f, _, _) in enumerate(pws) if f == fi]
        prev_ct = first(reversed(content_idx), lambda k, gw=gw: k < gw)
        next_ct = first(content_idx, lambda k, gw=gw: k > gw)
        prev_pw = pws[gw - 1][2] if gw > 0 else None
        next_pw = pws[gw + 1][2] if gw + 1 < len(pws) else None
        labels.append(ContextLabel(
            **quin,
            pp=j + 1,
            ps=len(syl.phonemes) - j,
            sstr_p=None if prev_syl is None else int(prev_syl.stressed),
            sstr_c=int(syl.stressed),
            sstr_n=None if next_syl is None else int(next_syl.stressed),
            sph_p=0 if prev_syl is None else len(prev_syl.phonemes),
            sph_c=len(syl.phonemes),
            sph_n=0 if next_syl is None else len(next_syl.phonemes),
            spw=si + 1,
            ssb=sum(1 for k in in_phrase if k < g and syls[k][2].stressed),
            ssa=sum(1 for k in in_phrase if k > g and syls[k][2].stressed),
            sds=0 if prev_st is None else g - prev_st,
            sns=0 if next_st is None else next_st - g,
            wpos_p=SENTINEL if prev_pw is None else prev_pw.pos,
            wpos_c=pw.pos,
            wpos_n=SENTINEL if next_pw is None else next_pw.pos,
            wsy_p=0 if prev_pw is None else len(prev_pw.syllables),
            wsy_c=len(pw.syllables),
            wsy_n=0 if next_pw is None else len(next_pw.syllables),
            wpp=wi + 1,
            wcb=sum(1 for k in phrase_pw if k < gw and pws[k][2].is_content),
            wca=sum(1 for k in phrase_pw if k > gw and pws[k][2].is_content),
            wdc=0 if prev_ct is None else gw - prev_ct,
            wnc=0 if next_ct is None else next_ct - gw,
            fsy_p=phrase_syl[fi - 1] if fi > 0 else 0,
            fsy_c=phrase_syl[fi],
            fsy_n=phrase_syl[fi + 1] if fi + 1 < up else 0,
            fw_p=phrase_words[fi - 1] if fi > 0 else 0,
            fw_c=phrase_words[fi],
            fw_n=phrase_words[fi + 1] if fi + 1 < up else 0,
            fpu=fi + 1,
            ftone=phrases[fi].endtone,
            usy=usy, uw=uw, up=up,
        ))
    return labels
