"""The 48-entry Bengali phoneme inventory with articulatory attributes.

Symbols are ASCII-safe: aspiration is an ``h`` suffix, retroflex stops are
upper case, nasal vowels carry a ``~`` suffix and silence is ``sil``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class Phoneme:
    symbol: str
    ipa: str
    cls: str  # vowel | consonant | silence
    place: str = ""
    manner: str = ""
    voiced: bool = False
    aspirated: bool = False
    nasal: bool = False
    vowel_height: str = ""
    vowel_backness: str = ""
    vowel_rounding: str = ""

    @property
    def is_vowel(self) -> bool:
        return self.cls == "vowel"


# (symbol, ipa, place, manner, voiced, aspirated)
_CONSONANTS = [
    ("p", "p", "bilabial", "plosive", False, False),
    ("ph", "pʰ", "bilabial", "plosive", False, True),
    ("b", "b", "bilabial", "plosive", True, False),
    ("bh", "bʰ", "bilabial", "plosive", True, True),
    ("t", "t", "dental", "plosive", False, False),
    ("th", "tʰ", "dental", "plosive", False, True),
    ("d", "d", "dental", "plosive", True, False),
    ("dh", "dʰ", "dental", "plosive", True, True),
    ("T", "t̪", "retroflex", "plosive", False, False),
    ("Th", "t̪ʰ", "retroflex", "plosive", False, True),
    ("D", "d̪", "retroflex", "plosive", True, False),
    ("Dh", "d̪ʰ", "retroflex", "plosive", True, True),
    ("k", "k", "velar", "plosive", False, False),
    ("kh", "kʰ", "velar", "plosive", False, True),
    ("g", "g", "velar", "plosive", True, False),
    ("gh", "gʰ", "velar", "plosive", True, True),
    ("c", "tʃ", "alveolar", "affricate", False, False),
    ("ch", "tʃʰ", "alveolar", "affricate", False, True),
    ("J", "dʒ", "alveolar", "affricate", True, False),
    ("Jh", "dʒʰ", "alveolar", "affricate", True, True),
    ("s", "s", "alveolar", "fricative", False, False),
    ("S", "ʃ", "postalveolar", "fricative", False, False),
    ("h", "h", "glottal", "fricative", False, False),
    ("m", "m", "bilabial", "nasal", True, False),
    ("n", "n", "dental", "nasal", True, False),
    ("N", "ŋ", "velar", "nasal", True, False),
    ("Nr", "ɳ", "palatal", "nasal", True, False),
    ("l", "l", "dental", "lateral", True, False),
    ("r", "r", "alveolar", "trill", True, False),
    ("R", "ɽ", "postalveolar", "flap", True, False),
    ("Rh", "ɽ̪", "postalveolar", "flap", True, True),
    ("y", "j", "palatal", "approximant", True, False),
    ("w", "w", "bilabial", "approximant", True, False),
]

# (symbol, ipa, height, backness, rounding)
_VOWELS = [
    ("u", "u", "close", "back", "rounded"),
    ("o", "o", "close-mid", "back", "rounded"),
    ("O", "ɔ", "open", "back", "rounded"),
    ("a", "a", "open", "central", "unrounded"),
    ("ae", "æ", "open-mid", "front", "unrounded"),
    ("e", "e", "close-mid", "front", "unrounded"),
    ("i", "i", "close", "front", "unrounded"),
]

SILENCE = "sil"
SENTINEL = "x"


@lru_cache(maxsize=None)
def phoneme_inventory() -> tuple[Phoneme, ...]:
    """Return the fixed inventory: 33 consonants, 7 oral + 7 nasal vowels, silence."""
    out = []
    for sym, ipa, place, manner, voiced, asp in _CONSONANTS:
        out.append(Phoneme(sym, ipa, "consonant", place=place, manner=manner,
                           voiced=voiced, aspirated=asp, nasal=manner == "nasal"))
    for nasal in (False, True):
        for sym, ipa, height, back, rnd in _VOWELS:
            out.append(Phoneme(
                sym + ("~" if nasal else ""), ipa + ("̃" if nasal else ""), "vowel",
                voiced=True, nasal=nasal,
                vowel_height=height, vowel_backness=back, vowel_rounding=rnd,
            ))
    out.append(Phoneme(SILENCE, "", "silence"))
    return tuple(out)


@lru_cache(maxsize=None)
def phoneme_table() -> dict[str, Phoneme]:
    return {p.symbol: p for p in phoneme_inventory()}


def lookup(symbol: str) -> Phoneme:
    try:
        return phoneme_table()[symbol]
    except KeyError:
        raise KeyError(f"unknown phoneme {symbol!r}") from None


def is_vowel(symbol: str) -> bool:
    return lookup(symbol).is_vowel


def inventory_hash() -> str:
    blob = "\n".join(repr(p) for p in phoneme_inventory()).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
