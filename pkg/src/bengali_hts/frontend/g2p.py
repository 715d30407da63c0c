"""Rule-table grapheme-to-phoneme conversion.

Rule files are UTF-8, one rule per line::

    <grapheme-sequence> TAB <phoneme symbols separated by spaces>

Lines starting with ``#`` are comments. At each position the longest
matching grapheme sequence wins, earlier lines breaking ties. A phoneme
written with a trailing ``?`` is an inherent vowel: it is dropped when it
ends the word and the word has another vowel.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from .inventory import is_vowel, phoneme_table


class G2PError(ValueError):
    pass


@dataclass(frozen=True)
class G2PRule:
    graphemes: str
    phonemes: tuple[str, ...]
    inherent_final: bool
    line: int


class G2PRuleTable:
    def __init__(self, rules: list[G2PRule]):
        self.rules = list(rules)
        self._by_graphemes: dict[str, G2PRule] = {}
        for r in self.rules:
            self._by_graphemes.setdefault(r.graphemes, r)
        self.max_length = max((len(g) for g in self._by_graphemes), default=0)

    def __len__(self):
        return len(self.rules)

    @classmethod
    def parse(cls, text: str, source: str = "<rules>") -> "G2PRuleTable":
        table = phoneme_table()
        rules = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" not in line:
                raise G2PError(f"{source}:{lineno}: expected '<graphemes>\\t<phonemes>'")
            graphemes, phones = line.split("\t", 1)
            if not graphemes:
                raise G2PError(f"{source}:{lineno}: empty grapheme sequence")
            symbols = phones.split()
            inherent = False
            out = []
            for k, sym in enumerate(symbols):
                if sym.endswith("?"):
                    if k != len(symbols) - 1:
                        raise G2PError(f"{source}:{lineno}: '?' only allowed on the last phoneme")
                    sym = sym[:-1]
                    inherent = True
                if sym not in table:
                    raise G2PError(f"{source}:{lineno}: phoneme {sym!r} not in inventory")
                out.append(sym)
            if inherent and not is_vowel(out[-1]):
                raise G2PError(f"{source}:{lineno}: inherent marker on a non-vowel")
            rules.append(G2PRule(graphemes, tuple(out), inherent, lineno))
        return cls(rules)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "G2PRuleTable":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), source=os.fspath(path))

    @classmethod
    def default(cls) -> "G2PRuleTable":
        text = resources.files("bengali_hts.frontend").joinpath(
            "data/default_g2p.tsv").read_text(encoding="utf-8")
        return cls.parse(text, source="default_g2p.tsv")

    def match(self, word: str, pos: int) -> G2PRule | None:
        for n in range(min(self.max_length, len(word) - pos), 0, -1):
            rule = self._by_graphemes.get(word[pos:pos + n])
            if rule is not None:
                return rule
        return None


_DEFAULT: G2PRuleTable | None = None


def default_rules() -> G2PRuleTable:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = G2PRuleTable.default()
    return _DEFAULT


def g2p(word: str, rules: G2PRuleTable | None = None) -> list[str]:
    """Convert one orthographic word to phoneme symbols.

    Raises
    ------
    G2PError
        If some grapheme matches no rule; the message names the grapheme and
        its UTF-8 byte offset.
    """
    rules = rules or default_rules()
    out: list[str] = []
    offset = 0
    for part in word.split("-"):
        out.extend(_convert(part, rules, offset))
        offset += len(part.encode("utf-8")) + 1
    return out


def _convert(word: str, rules: G2PRuleTable, offset: int) -> list[str]:
    phones: list[str] = []
    last_inherent = False
    pos = 0
    while pos < len(word):
        rule = rules.match(word, pos)
        if rule is None:
            byte_off = offset + len(word[:pos].encode("utf-8"))
            raise G2PError(
                f"no rule for grapheme {word[pos]!r} (U+{ord(word[pos]):04X}) "
                f"at byte offset {byte_off}")
        phones.extend(rule.phonemes)
        last_inherent = rule.inherent_final and bool(rule.phonemes)
        pos += len(rule.graphemes)
    if last_inherent and sum(is_vowel(p) for p in phones) > 1:
        phones.pop()
    return phones
