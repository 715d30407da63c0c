import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bengali_hts.frontend.labels import ContextLabel, format_label
from bengali_hts.model import GVModel, tree_traverse
from bengali_hts.signal import DeltaWindows, window_matrix
from bengali_hts.synthesis import (
    SynthesisConfig,
    apply_gv,
    band_solve,
    decide_voicing,
    determine_durations,
    durations_for_phones,
    labels_to_chain,
    mlpg,
    normal_equations,
    round_half_away,
    synth_utterance,
    write_trajectory_csv,
)

TEXT = "type=simple-affirmative-verb {a.m.i}/PRON {bh.a.t}/NN {kh.a.i}/VF"
STATIC_ONLY = DeltaWindows(((0.0, 1.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)))


# ---------------------------------------------------------------- durations

def test_unconstrained_durations_round():
    assert determine_durations([3.4, 5.6]).tolist() == [3, 6]
    assert determine_durations([2.5, 0.2, 0.5]).tolist() == [3, 1, 1]


def test_target_duration_closed_form():
    assert determine_durations([3.0, 5.0], [1.0, 2.0], target_frames=11).tolist() == [4, 7]


def test_target_shorter_than_chain():
    with pytest.raises(ValueError, match="shorter"):
        determine_durations([3.0, 5.0], [1.0, 1.0], target_frames=1)


def test_round_half_away_from_zero():
    assert round_half_away([0.5, 1.5, 2.5, -0.5, 2.4999]).tolist() == [1, 2, 3, -1, 2]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(1.0, 12.0), min_size=1, max_size=15),
       st.floats(0.0, 3.0), st.integers(0, 2 ** 31))
def test_target_total_is_met_when_no_floor_activates(mu, stretch, seed):
    mu = np.array(mu)
    var = np.random.default_rng(seed).uniform(0.25, 4.0, mu.size)
    T = int(round(mu.sum() * (0.8 + stretch)))
    T = max(T, mu.size)
    d = determine_durations(mu, var, target_frames=T)
    rho = (T - mu.sum()) / var.sum()
    if np.all(mu + rho * var >= 1.5):
        assert d.sum() == T
    assert np.all(d >= 1)


# ---------------------------------------------------------------- voicing

def test_voicing_rule():
    assert decide_voicing([0.9], [4]).tolist() == [True] * 4
    assert decide_voicing([0.5], [2]).tolist() == [False, False]
    assert decide_voicing([0.9, 0.1, 0.9], [2, 1, 2]).tolist() == [True, True, False, True, True]


# ---------------------------------------------------------------- MLPG

def dense_mlpg(mean, var, windows):
    """Dense normal equations from the explicit window matrix."""
    T = mean.shape[0]
    W = window_matrix(T, windows).toarray()
    K = len(windows)
    D = mean.shape[1] // K
    out = np.zeros((T, D))
    for d in range(D):
        mu = np.concatenate([mean[:, k * D + d] for k in range(K)])
        prec = 1.0 / np.concatenate([var[:, k * D + d] for k in range(K)])
        A = W.T @ (prec[:, None] * W)
        out[:, d] = np.linalg.solve(A, W.T @ (prec * mu))
    return out


def test_static_only_returns_means():
    rng = np.random.default_rng(0)
    mean, var = rng.normal(size=(9, 6)), rng.uniform(0.1, 2, (9, 6))
    assert np.array_equal(mlpg(mean, var, STATIC_ONLY), mean[:, :2])


def test_three_frame_hand_instance():
    mean = np.array([[1.0, 0.0, 0.0], [2.0, 0.5, 0.0], [4.0, 0.0, -1.0]])
    var = np.array([[1.0, 0.5, 2.0], [0.5, 0.5, 2.0], [1.0, 0.25, 1.0]])
    np.testing.assert_allclose(mlpg(mean, var), dense_mlpg(mean, var, DeltaWindows()),
                               atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 50), st.integers(1, 3), st.integers(0, 2 ** 31))
def test_banded_solution_matches_dense_oracle(T, D, seed):
    rng = np.random.default_rng(seed)
    mean = rng.normal(0, 2, (T, 3 * D))
    var = rng.uniform(1e-3, 3.0, (T, 3 * D))
    got = mlpg(mean, var)
    assert np.max(np.abs(got - dense_mlpg(mean, var, DeltaWindows()))) <= 1e-8


def test_band_solve_rejects_indefinite():
    with pytest.raises(np.linalg.LinAlgError):
        band_solve(np.array([[1.0, 2.0], [1.0, 0.0]]), np.ones(2))


def test_normal_equations_band_matches_dense():
    rng = np.random.default_rng(2)
    T = 7
    mean, var = rng.normal(size=(T, 3)), rng.uniform(0.5, 2, (T, 3))
    band, rhs = normal_equations(mean, var, DeltaWindows())
    W = window_matrix(T).toarray()
    prec = 1.0 / var.T.reshape(-1)
    A = W.T @ (prec[:, None] * W)
    for j in range(band.shape[1]):
        np.testing.assert_allclose(band[:T - j, j], np.diag(A, j), atol=1e-12)
    np.testing.assert_allclose(rhs, W.T @ (prec * mean.T.reshape(-1)), atol=1e-12)


# ---------------------------------------------------------------- GV

def test_gv_weight_zero_is_identity():
    c = np.random.default_rng(0).normal(size=(30, 3))
    out = apply_gv(c, GVModel(np.ones(3), np.ones(3)), 0.0)
    assert np.array_equal(out, c)


def test_gv_at_target_does_not_move():
    c = np.random.default_rng(1).normal(size=(40, 2))
    out = apply_gv(c, GVModel(c.var(axis=0), np.full(2, 0.1)), 0.7)
    assert np.max(np.abs(out - c)) <= 1e-6


def test_gv_moves_under_varianced_input_towards_target():
    rng = np.random.default_rng(2)
    target = np.array([1.0, 0.3, 0.05])
    c = rng.normal(size=(60, 3)) * np.sqrt(0.25 * target) + np.array([1.0, -2.0, 0.5])
    c = (c - c.mean(0)) * np.sqrt(0.25 * target / c.var(0)) + c.mean(0)
    out = apply_gv(c, GVModel(target, 0.01 * target ** 2), 0.7)
    before = np.abs(c.var(0) / target - 1)
    after = np.abs(out.var(0) / target - 1)
    assert np.all(after < before)
    np.testing.assert_allclose(out.mean(0), c.mean(0), atol=1e-10)


def test_gv_rejects_bad_input():
    gv = GVModel(np.ones(1), np.ones(1))
    with pytest.raises(ValueError):
        apply_gv(np.array([[np.nan], [1.0]]), gv, 0.7)
    with pytest.raises(ValueError):
        apply_gv(np.zeros((3, 1)), gv, -1.0)


# ---------------------------------------------------------------- chain and synthesis

def test_chain_length_and_training_assignment(trained20, utts20):
    ms, _ = trained20
    labels = utts20[0].labels
    chain = labels_to_chain(labels, ms)
    assert len(chain) == 5 * len(labels)
    for i, lab in enumerate(labels):
        hmm = ms.fullcontext[format_label(lab)]
        for s in range(5):
            for stream in ("spectrum", "excitation", "duration"):
                assert hmm.ids(stream)[s] == tree_traverse(lab, ms.trees[(s + 1, stream)])
            np.testing.assert_array_equal(chain.spec_mean[5 * i + s],
                                          ms.spectrum(hmm.spectrum[s]).mean)


def test_indistinguishable_unseen_labels_share_parameters(trained20):
    ms, _ = trained20
    # every threshold question stops at 10, so usy 50 and 60 look the same
    a = ContextLabel("x", "sil", "a", "k", "a", usy=50, uw=20, up=3)
    b = ContextLabel("x", "sil", "a", "k", "a", usy=60, uw=20, up=3)
    ca, cb = labels_to_chain([a], ms), labels_to_chain([b], ms)
    np.testing.assert_array_equal(ca.spec_mean, cb.spec_mean)
    np.testing.assert_array_equal(ca.dur_mean, cb.dur_mean)


def test_unknown_phoneme_in_chain(trained20):
    with pytest.raises(Exception, match="zz"):
        labels_to_chain([ContextLabel("x", "x", "zz", "x", "x")], trained20[0])


def test_synthesis_length_voicing_and_f0(trained20):
    res = synth_utterance(TEXT, trained20[0])
    n = int(res.durations.sum())
    assert len(res.waveform) == n * 80
    assert res.mcep.shape == (n, 25)
    chain = labels_to_chain(res.labels, trained20[0])
    np.testing.assert_array_equal(res.voiced, decide_voicing(chain, res.durations))
    assert np.array_equal(np.isfinite(res.lf0), res.voiced)
    assert np.array_equal(np.isfinite(res.f0_hz), res.voiced)


def test_target_frames_sets_total_length(trained20):
    res = synth_utterance(TEXT, trained20[0], SynthesisConfig(target_frames=300))
    assert res.durations.sum() == 300 and len(res.waveform) == 24000


def test_phone_frames(trained20):
    ms = trained20[0]
    res = synth_utterance(TEXT, ms)
    n_labels = len(res.labels)
    frames = [12] * n_labels
    fixed = synth_utterance(TEXT, ms, phone_frames=frames)
    per_phone = fixed.durations.reshape(n_labels, 5).sum(axis=1)
    assert per_phone.tolist() == frames
    chain = labels_to_chain(res.labels, ms)
    assert durations_for_phones(chain, [3] * n_labels).tolist() == [1] * (5 * n_labels)


def test_silence_only_is_quiet(trained20):
    sil = [ContextLabel("x", "x", "sil", "x", "x", usy=0, uw=0, up=0)]
    res = synth_utterance(sil, trained20[0])
    assert np.sqrt(np.mean(res.waveform.samples ** 2)) < 1e-3


def test_synthesis_is_deterministic(trained20):
    cfg = SynthesisConfig(gv_weight=0.7, seed=3)
    a = synth_utterance(TEXT, trained20[0], cfg)
    b = synth_utterance(TEXT, trained20[0], cfg)
    assert np.array_equal(a.waveform.samples, b.waveform.samples)


def test_gv_widens_cepstral_variance(trained20):
    ms = trained20[0]
    plain = synth_utterance(TEXT, ms)
    gv = synth_utterance(TEXT, ms, SynthesisConfig(gv_weight=0.7))
    target = ms.gv.mean
    gap_plain = np.abs(plain.mcep.var(0) / target - 1)
    gap_gv = np.abs(gv.mcep.var(0) / target - 1)
    assert np.mean(gap_gv) < np.mean(gap_plain)


def test_empty_text(trained20):
    with pytest.raises(ValueError, match="empty"):
        synth_utterance("  \n", trained20[0])


def test_synthesis_config_validation():
    with pytest.raises(ValueError):
        SynthesisConfig(target_frames=0)
    with pytest.raises(ValueError):
        SynthesisConfig(gv_weight=-0.1)


def test_trajectory_csv(trained20, tmp_path):
    res = synth_utterance(TEXT, trained20[0])
    write_trajectory_csv(res, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header[0] == "frame" and header[1] == "c0" and header[-2:] == ["f0_hz_or_0", "voiced"]
    assert len(header) == 1 + 25 + 2 and len(lines) == res.mcep.shape[0] + 1
    for line, v in zip(lines[1:], res.voiced):
        row = line.split(",")
        assert int(row[-1]) == int(v) and (float(row[-2]) > 0) == bool(v)
