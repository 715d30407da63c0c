"""Yes/no context questions for decision-tree clustering."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..frontend.inventory import SENTINEL, Phoneme, phoneme_inventory
from ..frontend.labels import (
    BINARY_KEYS,
    CATEGORICAL_DOMAINS,
    NUMERIC_KEYS,
    PHONE_KEYS,
    ContextLabel,
)

THRESHOLDS = range(1, 11)
# an undefined numeric field ("x") never satisfies a threshold question
_UNDEFINED = np.iinfo(np.int64).max


@dataclass(frozen=True)
class Question:
    """Membership (``values``) or ``<= threshold`` test on one label field."""

    name: str
    field: str
    values: frozenset | None = None
    threshold: int | None = None

    def __post_init__(self):
        if (self.values is None) == (self.threshold is None):
            raise ValueError("a question needs exactly one of values / threshold")

    def answer(self, label: ContextLabel) -> bool:
        v = getattr(label, self.field)
        if self.values is not None:
            return v in self.values
        return v is not None and v <= self.threshold

    def answer_many(self, column: np.ndarray) -> np.ndarray:
        """Vectorized answer over a column from :func:`label_columns`."""
        if self.values is not None:
            return np.isin(column, list(self.values))
        return column <= self.threshold


def label_columns(labels: Sequence[ContextLabel]) -> dict[str, np.ndarray]:
    """Field-wise arrays for fast question answering (numeric ``None`` maps to +inf-like)."""
    cols = {}
    for key in PHONE_KEYS + tuple(CATEGORICAL_DOMAINS):
        cols[key] = np.array([getattr(lab, key) for lab in labels], dtype=object)
    for key in NUMERIC_KEYS:
        vals = [getattr(lab, key) for lab in labels]
        if key in BINARY_KEYS:
            cols[key] = np.array([-1 if v is None else v for v in vals], dtype=np.int64)
        else:
            cols[key] = np.array([_UNDEFINED if v is None else v for v in vals], dtype=np.int64)
    return cols


def _title(s: str) -> str:
    return "-".join(part.capitalize() for part in s.split("-"))


def phoneme_classes(inventory: Sequence[Phoneme]) -> dict[str, frozenset[str]]:
    """Articulatory classes, named e.g. ``C-Voiced-Plosive`` or ``V-Front``."""
    cons = [p for p in inventory if p.cls == "consonant"]
    vows = [p for p in inventory if p.cls == "vowel"]
    classes: dict[str, set[str]] = {
        "Vowel": {p.symbol for p in vows},
        "Consonant": {p.symbol for p in cons},
        "Silence": {p.symbol for p in inventory if p.cls == "silence"},
        "Nasal": {p.symbol for p in inventory if p.nasal},
        "C-Voiced": {p.symbol for p in cons if p.voiced},
        "C-Unvoiced": {p.symbol for p in cons if not p.voiced},
        "C-Aspirated": {p.symbol for p in cons if p.aspirated},
        "C-Unaspirated": {p.symbol for p in cons if not p.aspirated},
        "V-Nasal": {p.symbol for p in vows if p.nasal},
        "V-Oral": {p.symbol for p in vows if not p.nasal},
    }
    for p in cons:
        classes.setdefault(f"C-{_title(p.place)}", set()).add(p.symbol)
        classes.setdefault(f"C-{_title(p.manner)}", set()).add(p.symbol)
        voicing = "Voiced" if p.voiced else "Unvoiced"
        classes.setdefault(f"C-{voicing}-{_title(p.manner)}", set()).add(p.symbol)
    for p in vows:
        classes.setdefault(f"V-{_title(p.vowel_height)}", set()).add(p.symbol)
        classes.setdefault(f"V-{_title(p.vowel_backness)}", set()).add(p.symbol)
        classes.setdefault(f"V-{_title(p.vowel_rounding)}", set()).add(p.symbol)
    for p in inventory:
        classes[f"Phone-{p.symbol}"] = {p.symbol}
    classes["Boundary"] = {SENTINEL}
    return {k: frozenset(v) for k, v in classes.items()}


def generate_question_set(inventory: Sequence[Phoneme] | None = None) -> list[Question]:
    """Questions over every label field.

    Each quinphone slot gets one membership question per articulatory class
    and per phoneme; numeric fields get ``<= k`` for k in 1..10; categorical
    fields get one membership question per value.
    """
    inventory = tuple(inventory or phoneme_inventory())
    out = []
    classes = phoneme_classes(inventory)
    for slot in PHONE_KEYS:
        for name, members in classes.items():
            out.append(Question(f"{slot}-{name}", slot, values=members))
    for key, domain in CATEGORICAL_DOMAINS.items():
        for v in (*domain, SENTINEL):
            out.append(Question(f"{key}=={v}", key, values=frozenset({v})))
    for key in BINARY_KEYS:
        for v in (0, 1):
            out.append(Question(f"{key}=={v}", key, values=frozenset({v})))
    for key in NUMERIC_KEYS:
        if key in BINARY_KEYS:
            continue
        for k in THRESHOLDS:
            out.append(Question(f"{key}<={k}", key, threshold=k))
    return out


def answer_matrix(questions: Sequence[Question], labels: Sequence[ContextLabel]) -> np.ndarray:
    """Boolean ``(n_questions, n_labels)`` matrix of answers."""
    cols = label_columns(labels)
    if not labels:
        return np.zeros((len(questions), 0), dtype=bool)
    return np.stack([q.answer_many(cols[q.field]) for q in questions])
