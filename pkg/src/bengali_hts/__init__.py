"""Trainable HMM-based speech synthesis for Bengali.

Subpackages follow the processing chain: :mod:`~bengali_hts.frontend`
(text to full-context labels), :mod:`~bengali_hts.signal` (analysis and
vocoding), :mod:`~bengali_hts.model` and :mod:`~bengali_hts.training`
(context-dependent MSD-HMMs), :mod:`~bengali_hts.synthesis` (parameter
generation) and :mod:`~bengali_hts.corpus` (corpus files and the synthetic
test corpus).
"""

__version__ = "0.1.0"

from .corpus import generate_synthetic_corpus, load_corpus  # noqa: E402
from .estimators import F0Extractor, HTSVoice, MelCepstrumAnalyzer  # noqa: E402
from .evaluation import aggregate_mos, compare_f0, compare_spectra  # noqa: E402
from .frontend import build_context_labels, parse_tagged_line, phoneme_inventory  # noqa: E402
from .model import load_model_set, save_model_set  # noqa: E402
from .synthesis import SynthesisConfig, synth_utterance  # noqa: E402
from .training import TrainingConfig, train_pipeline  # noqa: E402

__all__ = [
    "F0Extractor",
    "HTSVoice",
    "MelCepstrumAnalyzer",
    "SynthesisConfig",
    "TrainingConfig",
    "__version__",
    "aggregate_mos",
    "build_context_labels",
    "compare_f0",
    "compare_spectra",
    "generate_synthetic_corpus",
    "load_corpus",
    "load_model_set",
    "parse_tagged_line",
    "phoneme_inventory",
    "save_model_set",
    "synth_utterance",
    "train_pipeline",
]
