import numpy as np
import pytest
from sklearn.base import clone

from bengali_hts import F0Extractor, HTSVoice, MelCepstrumAnalyzer
from bengali_hts._validation import NotFittedError, check_positive_int, check_waveform
from bengali_hts.corpus import load_corpus
from bengali_hts.signal import Waveform, estimate_f0, mel_cepstrogram

TEXT = "type=simple-affirmative-verb {a.m.i}/PRON {bh.a.t}/NN {kh.a.i}/VF"


def _tone(hz=150.0, n=8000):
    return np.sin(2 * np.pi * hz * np.arange(n) / 16000) * 0.4


def test_get_params_and_clone():
    est = MelCepstrumAnalyzer(order=12, alpha=0.35)
    assert est.get_params()["order"] == 12
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    voice = HTSVoice(mdl_scale=0.5, gv_weight=0.7)
    assert clone(voice).get_params()["gv_weight"] == 0.7
    assert set(voice.get_params()) >= {"monophone_iterations", "mdl_scale", "seed"}


def test_analyzer_matches_function():
    x = _tone()
    est = MelCepstrumAnalyzer().fit()
    np.testing.assert_array_equal(est.transform(x), mel_cepstrogram(Waveform(x, 16000)))
    out = est.transform([x, x[:4000]])
    assert isinstance(out, list) and len(out) == 2


def test_f0_extractor_matches_function():
    x = _tone(200.0)
    f0 = F0Extractor().fit_transform(x)
    np.testing.assert_array_equal(f0, estimate_f0(Waveform(x, 16000)))


def test_not_fitted():
    with pytest.raises(NotFittedError):
        MelCepstrumAnalyzer().transform(_tone())
    with pytest.raises(NotFittedError):
        HTSVoice().predict(TEXT)


def test_input_validation():
    with pytest.raises(ValueError, match="mono"):
        check_waveform(np.zeros((2, 10)), 16000)
    with pytest.raises(ValueError, match="non-finite"):
        check_waveform(np.array([0.0, np.inf]), 16000)
    with pytest.raises(ValueError, match="sample-rate"):
        check_waveform(Waveform(np.zeros(10), 8000), 16000)
    with pytest.raises(ValueError):
        check_positive_int(0, "n")
    with pytest.raises(ValueError):
        check_positive_int(True, "n")
    with pytest.raises(ValueError):
        MelCepstrumAnalyzer(alpha=1.5).fit()


def test_voice_fit_predict_save_load(corpus20, tmp_path):
    voice = HTSVoice(monophone_iterations=1, fullcontext_iterations=1, tied_iterations=0)
    voice.fit(load_corpus(corpus20)[:8])
    wav = voice.predict(TEXT)
    assert isinstance(wav, Waveform) and len(wav) % 80 == 0
    assert np.isfinite(voice.score(None))
    assert len(voice.predict([TEXT, TEXT])) == 2
    voice.save(tmp_path / "v.bhts")
    back = HTSVoice.load(tmp_path / "v.bhts")
    assert np.array_equal(back.predict(TEXT).samples, wav.samples)


def test_voice_rejects_empty_corpus():
    with pytest.raises(ValueError):
        HTSVoice().fit([])
