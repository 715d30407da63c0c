"""Annotated corpora: the ``.utt`` format, directory loading, synthetic data and feature caching."""

from .cache import CacheFormatError, FeatureCache, extract_features
from .loader import CorpusEntry, CorpusError, load_corpus
from .synthetic import (
    DEFAULT_PHONES,
    SimulatedSpeaker,
    generate_synthetic_corpus,
    render,
    synthetic_utterances,
)
from .utt_format import AnnotationFormatError, format_annotation, parse_annotation

__all__ = [
    "DEFAULT_PHONES",
    "AnnotationFormatError",
    "CacheFormatError",
    "CorpusEntry",
    "CorpusError",
    "FeatureCache",
    "SimulatedSpeaker",
    "extract_features",
    "format_annotation",
    "generate_synthetic_corpus",
    "load_corpus",
    "parse_annotation",
    "render",
    "synthetic_utterances",
]
