"""Line-oriented ``.utt`` annotation files.

::

    UTT <id> TYPE=<sentence-type>
    PHONE <start> <end> sil
    PHRASE <start> <end> ENDTONE=<tone>
    PWORD <start> <end> POS=<tag> TONE=<rising|low>
    SYL <start> <end> STRESS=<0|1>
    PHONE <start> <end> <symbol>
    ...

Children follow their parent in temporal order. A ``sil`` phone is a pause
at utterance level and closes the open phrase. Times are seconds with four
decimals.
"""

from __future__ import annotations

from types import SimpleNamespace

from ..frontend.annotation import (
    ENDTONES,
    WORD_TONES,
    Pause,
    PhraseAnnotation,
    ProsodicWord,
    SentenceType,
    Syllable,
    UtteranceAnnotation,
    WordToken,
)
from ..frontend.inventory import SILENCE, phoneme_table

RESOLUTION = 1e-4
_EPS = RESOLUTION / 2


class AnnotationFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _fmt(t: float) -> str:
    return f"{t:.4f}"


def format_annotation(utt: UtteranceAnnotation) -> str:
    """Serialize an annotation whose every layer carries times."""
    out = [f"UTT {utt.id} TYPE={utt.sentence_type.value}"]
    for seg in utt.segments():
        if isinstance(seg, Pause):
            out.append(f"PHONE {_fmt(seg.start)} {_fmt(seg.end)} {SILENCE}")
            continue
        out.append(f"PHRASE {_fmt(seg.start)} {_fmt(seg.end)} ENDTONE={seg.endtone}")
        for pw in seg.prosodic_words:
            tone = f" TONE={pw.tone}" if pw.tone else ""
            out.append(f"PWORD {_fmt(pw.start)} {_fmt(pw.end)} POS={pw.pos}{tone}")
            for syl in pw.syllables:
                out.append(f"SYL {_fmt(syl.start)} {_fmt(syl.end)} STRESS={int(syl.stressed)}")
                for p, (s, e) in zip(syl.phonemes, syl.phone_times):
                    out.append(f"PHONE {_fmt(s)} {_fmt(e)} {p}")
    return "\n".join(out) + "\n"


class _Parser:
    def __init__(self):
        self.utt: UtteranceAnnotation | None = None
        self.phrase: PhraseAnnotation | None = None
        self.pword: ProsodicWord | None = None
        self.syl: Syllable | None = None
        self.last_end = 0.0
        self.phones = phoneme_table()

    # each record: (line, start, end)
    def times(self, n, fields):
        if len(fields) < 3:
            raise AnnotationFormatError(n, f"{fields[0]} needs <start> <end>")
        try:
            s, e = round(float(fields[1]), 4), round(float(fields[2]), 4)
        except ValueError:
            raise AnnotationFormatError(n, f"malformed time in {' '.join(fields[:3])!r}") from None
        if s < 0:
            raise AnnotationFormatError(n, f"negative time {s}")
        if e < s:
            raise AnnotationFormatError(n, f"end {e:.4f} before start {s:.4f}")
        return s, e

    @staticmethod
    def attrs(n, fields, allowed):
        out = {}
        for f in fields:
            if "=" not in f:
                raise AnnotationFormatError(n, f"expected KEY=value, got {f!r}")
            k, v = f.split("=", 1)
            if k not in allowed:
                raise AnnotationFormatError(n, f"unknown attribute {k!r}")
            out[k] = v
        return out

    def within(self, n, what, s, e, parent, pname):
        if parent.start is not None and (s < parent.start - _EPS or e > parent.end + _EPS):
            raise AnnotationFormatError(
                n, f"{what} [{s:.4f}, {e:.4f}] outside its {pname} "
                   f"[{parent.start:.4f}, {parent.end:.4f}]")

    def monotone(self, n, what, s, e):
        if s < self.last_end - _EPS:
            raise AnnotationFormatError(
                n, f"non-monotone times: {what} starts at {s:.4f} before {self.last_end:.4f}")

    def close_syl(self, n):
        if self.syl is not None and not self.syl.phonemes:
            raise AnnotationFormatError(n, "syllable without phones")
        self.syl = None

    def close_pword(self, n):
        self.close_syl(n)
        if self.pword is not None and not self.pword.words[0].syllables:
            raise AnnotationFormatError(n, "prosodic word without syllables")
        if self.pword is not None:
            w = self.pword.words[0]
            w.phonemes = [p for syl in w.syllables for p in syl.phonemes]
            w.orthography = "{" + ".".join(w.phonemes) + "}"
        self.pword = None

    def close_phrase(self, n):
        self.close_pword(n)
        if self.phrase is not None:
            ph = self.phrase
            if not ph.prosodic_words:
                raise AnnotationFormatError(n, "phrase without prosodic words")
            self.utt.phrases.append(
                PhraseAnnotation(ph.prosodic_words, ph.endtone, ph.start, ph.end))
        self.phrase = None

    def record(self, n, fields):
        kind = fields[0]
        if kind == "UTT":
            if self.utt is not None:
                raise AnnotationFormatError(n, "second UTT record")
            if len(fields) < 2:
                raise AnnotationFormatError(n, "UTT needs an id")
            a = self.attrs(n, fields[2:], {"TYPE"})
            if "TYPE" not in a:
                raise AnnotationFormatError(n, "UTT needs TYPE=<sentence-type>")
            try:
                stype = SentenceType.parse(a["TYPE"])
            except ValueError as exc:
                raise AnnotationFormatError(n, str(exc)) from None
            self.utt = UtteranceAnnotation(fields[1], stype, [], [])
            return
        if self.utt is None:
            raise AnnotationFormatError(n, f"orphan {kind}: no UTT record before it")
        if kind == "PHRASE":
            s, e = self.times(n, fields)
            a = self.attrs(n, fields[3:], {"ENDTONE"})
            tone = a.get("ENDTONE")
            if tone not in ENDTONES:
                raise AnnotationFormatError(n, f"unknown endtone {tone!r}")
            self.close_phrase(n)
            self.monotone(n, "PHRASE", s, e)
            # built into a PhraseAnnotation once its words are known
            self.phrase = SimpleNamespace(prosodic_words=[], endtone=tone, start=s, end=e)
        elif kind == "PWORD":
            s, e = self.times(n, fields)
            if self.phrase is None:
                raise AnnotationFormatError(n, "orphan PWORD outside a PHRASE")
            a = self.attrs(n, fields[3:], {"POS", "TONE"})
            tone = a.get("TONE")
            if tone is not None and tone not in WORD_TONES:
                raise AnnotationFormatError(n, f"unknown word tone {tone!r}")
            try:
                word = WordToken("", a.get("POS", ""))
            except ValueError as exc:
                raise AnnotationFormatError(n, str(exc)) from None
            self.close_pword(n)
            self.within(n, "PWORD", s, e, self.phrase, "PHRASE")
            self.monotone(n, "PWORD", s, e)
            self.pword = ProsodicWord([word], tone, 0, s, e)
            self.phrase.prosodic_words.append(self.pword)
        elif kind == "SYL":
            s, e = self.times(n, fields)
            if self.pword is None:
                raise AnnotationFormatError(n, "orphan SYL outside a PWORD")
            a = self.attrs(n, fields[3:], {"STRESS"})
            if a.get("STRESS", "0") not in ("0", "1"):
                raise AnnotationFormatError(n, f"STRESS must be 0 or 1, got {a['STRESS']!r}")
            self.close_syl(n)
            self.within(n, "SYL", s, e, self.pword, "PWORD")
            self.monotone(n, "SYL", s, e)
            self.syl = Syllable([], a.get("STRESS") == "1", s, e, [])
            syls = self.pword.words[0].syllables
            if self.syl.stressed and not any(x.stressed for x in syls):
                self.pword.stress_syllable = len(syls)
            syls.append(self.syl)
        elif kind == "PHONE":
            s, e = self.times(n, fields)
            if len(fields) != 4:
                raise AnnotationFormatError(n, "PHONE needs <start> <end> <symbol>")
            sym = fields[3]
            if sym not in self.phones:
                raise AnnotationFormatError(n, f"unknown phoneme {sym!r}")
            if sym == SILENCE:
                self.close_phrase(n)
                self.monotone(n, "pause", s, e)
                self.utt.pauses.append(Pause(len(self.utt.phrases), s, e))
            else:
                if self.syl is None:
                    raise AnnotationFormatError(n, "orphan PHONE outside a SYL")
                self.within(n, "PHONE", s, e, self.syl, "SYL")
                self.monotone(n, "PHONE", s, e)
                self.syl.phonemes.append(sym)
                self.syl.phone_times.append((s, e))
            self.last_end = e
            return
        else:
            raise AnnotationFormatError(n, f"unknown record type {kind!r}")
        self.last_end = s


def parse_annotation(text: str) -> UtteranceAnnotation:
    """Parse and validate one ``.utt`` document."""
    p = _Parser()
    n = 0
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            p.record(n, line.split())
    if p.utt is None:
        raise AnnotationFormatError(max(n, 1), "no UTT record")
    p.close_phrase(n + 1)
    if not p.utt.phrases:
        raise AnnotationFormatError(n, "utterance without phrases")
    return p.utt
