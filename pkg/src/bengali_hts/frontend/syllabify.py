"""Onset-maximizing syllabification."""

from __future__ import annotations

from .inventory import SILENCE, lookup, phoneme_inventory

_CLUSTER_SECOND = ("r", "l")
_CLUSTER_FIRST = ("p", "ph", "b", "bh", "t", "th", "d", "dh", "k", "kh", "g", "gh", "S", "s")


def _legal_onsets() -> frozenset[tuple[str, ...]]:
    onsets = {(p.symbol,) for p in phoneme_inventory() if p.cls == "consonant"}
    onsets |= {(a, b) for a in _CLUSTER_FIRST for b in _CLUSTER_SECOND}
    onsets |= {("s", "p"), ("s", "t"), ("s", "k"), ("s", "m"), ("s", "n"),
               ("s", "p", "r"), ("s", "t", "r"), ("s", "k", "r")}
    return frozenset(onsets)


LEGAL_ONSETS = _legal_onsets()


def syllabify(phonemes: list[str]) -> list[list[str]]:
    """Split a phoneme sequence into syllables, one per vowel.

    Consonants between two vowels go to the following syllable as long as
    they form a legal onset; the rest close the preceding syllable.
    """
    for p in phonemes:
        if p == SILENCE:
            raise ValueError("silence cannot be syllabified")
        lookup(p)
    nuclei = [i for i, p in enumerate(phonemes) if lookup(p).is_vowel]
    if not nuclei:
        raise ValueError(f"no vowel in {phonemes!r}; cannot syllabify")
    bounds = [0]
    for v, w in zip(nuclei, nuclei[1:]):
        cluster = tuple(phonemes[v + 1:w])
        split = len(cluster)
        for k in range(len(cluster) + 1):
            if not cluster[k:] or cluster[k:] in LEGAL_ONSETS:
                split = k
                break
        bounds.append(v + 1 + split)
    bounds.append(len(phonemes))
    return [list(phonemes[a:b]) for a, b in zip(bounds, bounds[1:])]
