"""scikit-learn style wrappers over the analysis, training and synthesis functions.

>>> voice = HTSVoice(monophone_iterations=3).fit(load_corpus("corpus"))  # doctest: +SKIP
>>> wav = voice.predict("type=simple-affirmative-verb আমি/PRON যাব/VF")             # doctest: +SKIP
"""

from __future__ import annotations

from dataclasses import fields

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_is_fitted, check_positive_int, check_waveforms
from .model.io import load_model_set, save_model_set
from .signal.analysis import AnalysisConfig, mel_cepstrogram
from .signal.pitch import estimate_f0
from .synthesis.synthesize import SynthesisConfig, synth_utterance
from .training.pipeline import TrainingConfig, train_pipeline


class MelCepstrumAnalyzer(TransformerMixin, BaseEstimator):
    """Waveform(s) to mel-cepstrograms of shape ``(T, order + 1)``.

    Stateless; ``fit`` only validates parameters.
    """

    def __init__(self, order=24, alpha=0.42, frame_length=400, frame_shift=80,
                 sample_rate=16000):
        self.order = order
        self.alpha = alpha
        self.frame_length = frame_length
        self.frame_shift = frame_shift
        self.sample_rate = sample_rate

    def _config(self) -> AnalysisConfig:
        return AnalysisConfig(sample_rate=self.sample_rate, frame_length=self.frame_length,
                              frame_shift=self.frame_shift, order=self.order, alpha=self.alpha)

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        out = [mel_cepstrogram(w, self.config_) for w in check_waveforms(X, self.sample_rate)]
        return out[0] if len(out) == 1 else out


class F0Extractor(TransformerMixin, BaseEstimator):
    """Waveform(s) to F0 tracks in Hz (NaN for unvoiced frames)."""

    def __init__(self, f0_min=60.0, f0_max=400.0, voicing_threshold=0.3,
                 frame_length=400, frame_shift=80, sample_rate=16000):
        self.f0_min = f0_min
        self.f0_max = f0_max
        self.voicing_threshold = voicing_threshold
        self.frame_length = frame_length
        self.frame_shift = frame_shift
        self.sample_rate = sample_rate

    def fit(self, X=None, y=None):
        self.config_ = AnalysisConfig(
            sample_rate=self.sample_rate, frame_length=self.frame_length,
            frame_shift=self.frame_shift, f0_min=self.f0_min, f0_max=self.f0_max,
            voicing_threshold=self.voicing_threshold)
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        out = [estimate_f0(w, self.config_) for w in check_waveforms(X, self.sample_rate)]
        return out[0] if len(out) == 1 else out


class HTSVoice(BaseEstimator):
    """Trainable voice: ``fit`` on corpus entries, ``predict`` text to waveform.

    Parameters mirror :class:`~bengali_hts.training.TrainingConfig` and
    :class:`~bengali_hts.synthesis.SynthesisConfig`.

    Attributes
    ----------
    models_ : ModelSet
    training_stats_ : list of StatsRow
    """

    def __init__(self, monophone_iterations=5, fullcontext_iterations=2, tied_iterations=2,
                 mdl_scale=1.0, min_occupancy=10.0, variance_floor=1e-6,
                 duration_variance_floor=0.25, boundary_margin=2,
                 gv_weight=0.0, gv_step=0.01, gv_iterations=50, seed=0, cache_dir=None):
        self.monophone_iterations = monophone_iterations
        self.fullcontext_iterations = fullcontext_iterations
        self.tied_iterations = tied_iterations
        self.mdl_scale = mdl_scale
        self.min_occupancy = min_occupancy
        self.variance_floor = variance_floor
        self.duration_variance_floor = duration_variance_floor
        self.boundary_margin = boundary_margin
        self.gv_weight = gv_weight
        self.gv_step = gv_step
        self.gv_iterations = gv_iterations
        self.seed = seed
        self.cache_dir = cache_dir

    def _training_config(self) -> TrainingConfig:
        names = [f.name for f in fields(TrainingConfig)]
        return TrainingConfig(**{k: getattr(self, k) for k in names})

    def fit(self, X, y=None):
        """Train on a sequence of :class:`~bengali_hts.corpus.CorpusEntry`."""
        entries = list(X)
        if not entries:
            raise ValueError("need at least one corpus entry")
        for k in ("monophone_iterations", "fullcontext_iterations", "tied_iterations"):
            if getattr(self, k) != 0:
                check_positive_int(getattr(self, k), k)
        self.models_, self.training_stats_ = train_pipeline(
            entries, self._training_config(), cache_dir=self.cache_dir)
        return self

    def _synthesis_config(self, target_frames=None) -> SynthesisConfig:
        return SynthesisConfig(target_frames=target_frames, gv_weight=self.gv_weight,
                               gv_step=self.gv_step, gv_iterations=self.gv_iterations,
                               seed=self.seed)

    def synthesize(self, source, target_frames=None, phone_frames=None):
        """Full :class:`~bengali_hts.synthesis.SynthesisResult` for one utterance."""
        check_is_fitted(self, "models_")
        return synth_utterance(source, self.models_, self._synthesis_config(target_frames),
                               phone_frames)

    def predict(self, X, target_frames=None):
        """Waveform for one utterance, or a list for a list of utterances."""
        if isinstance(X, str) or not isinstance(X, (list, tuple)):
            return self.synthesize(X, target_frames).waveform
        return [self.synthesize(x, target_frames).waveform for x in X]

    def score(self, X, y=None):
        """Mean per-frame training log-likelihood of the final EM pass."""
        check_is_fitted(self, "models_")
        last = self.training_stats_[-1]
        return last.total_ll / max(last.frames, 1)

    def save(self, path) -> None:
        check_is_fitted(self, "models_")
        save_model_set(self.models_, path)

    @classmethod
    def load(cls, path, **params) -> HTSVoice:
        voice = cls(**params)
        voice.models_ = load_model_set(path)
        voice.training_stats_ = []
        return voice


__all__ = ["F0Extractor", "HTSVoice", "MelCepstrumAnalyzer"]
