"""Bengali text frontend: phonemes, G2P, prosodic words, tones and full-context labels."""

from .annotation import (
    CONTENT_POS,
    ENDTONES,
    POS_TAGS,
    Pause,
    PhraseAnnotation,
    ProsodicWord,
    SentenceType,
    Syllable,
    UtteranceAnnotation,
    WordToken,
)
from .g2p import G2PError, G2PRuleTable, default_rules, g2p
from .inventory import SENTINEL, SILENCE, Phoneme, lookup, phoneme_inventory
from .labels import (
    LABEL_KEYS,
    AnnotationLayerError,
    ContextLabel,
    LabelParseError,
    build_context_labels,
    format_label,
    parse_label,
)
from .prosody import assign_stress, assign_tones, grouping_rule, mark_prosodic_words
from .syllabify import syllabify
from .text import TaggedTextError, make_word, parse_tagged_line, parse_tagged_text

__all__ = [
    "CONTENT_POS",
    "ENDTONES",
    "LABEL_KEYS",
    "POS_TAGS",
    "SENTINEL",
    "SILENCE",
    "AnnotationLayerError",
    "ContextLabel",
    "G2PError",
    "G2PRuleTable",
    "LabelParseError",
    "Pause",
    "Phoneme",
    "PhraseAnnotation",
    "ProsodicWord",
    "SentenceType",
    "Syllable",
    "TaggedTextError",
    "UtteranceAnnotation",
    "WordToken",
    "assign_stress",
    "assign_tones",
    "build_context_labels",
    "default_rules",
    "format_label",
    "g2p",
    "grouping_rule",
    "lookup",
    "make_word",
    "mark_prosodic_words",
    "parse_label",
    "parse_tagged_line",
    "parse_tagged_text",
    "phoneme_inventory",
    "syllabify",
]
