import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from bengali_hts.frontend import build_context_labels, parse_tagged_line
from bengali_hts.frontend.inventory import phoneme_inventory
from bengali_hts.frontend.labels import NUMERIC_KEYS, PHONE_KEYS, ContextLabel
from bengali_hts.model import (
    DecisionTree,
    DurationGaussian,
    ModelFormatError,
    MSDGaussian,
    Question,
    StreamGaussian,
    TreeNode,
    answer_matrix,
    gaussian_log_pdf,
    generate_question_set,
    load_model_set,
    model_set_bytes,
    msd_log_prob,
    msd_log_prob_frames,
    phoneme_classes,
    save_model_set,
    tree_traverse,
)

# ---------------------------------------------------------------- distributions

def test_msd_unvoiced_scores_unvoiced_weight():
    g = MSDGaussian(0.7, np.zeros(3), np.ones(3))
    assert msd_log_prob(None, g) == pytest.approx(math.log(0.3))


def test_msd_voiced_at_mean_with_unit_height_gaussian():
    g = MSDGaussian(0.4, np.array([1.0, 2.0, 3.0]), np.full(3, 1 / (2 * np.pi)))
    assert msd_log_prob(np.array([1.0, 2.0, 3.0]), g) == pytest.approx(math.log(0.4), abs=1e-12)


def test_msd_fully_voiced_is_plain_gaussian():
    mean, var = np.array([5.0, 0.1, -0.2]), np.array([0.3, 0.02, 0.5])
    x = np.array([5.2, 0.0, 0.1])
    expected = stats.multivariate_normal(mean, np.diag(var)).logpdf(x)
    assert msd_log_prob(x, MSDGaussian(1.0, mean, var)) == pytest.approx(expected, abs=1e-10)


def test_msd_contradicting_observation_is_minus_inf():
    assert msd_log_prob(None, MSDGaussian(1.0, np.zeros(3), np.ones(3))) == -np.inf
    assert msd_log_prob(np.zeros(3), MSDGaussian(0.0, np.zeros(3), np.ones(3))) == -np.inf


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-3, 3), st.floats(0.05, 4.0))
def test_msd_mass_sums_to_one(w, mu, var):
    g = MSDGaussian(w, np.array([mu]), np.array([var]))
    unvoiced = math.exp(msd_log_prob(None, g))
    voiced, _ = integrate.quad(lambda x: math.exp(msd_log_prob(np.array([x]), g)),
                               -np.inf, np.inf)
    assert unvoiced + voiced == pytest.approx(1.0, abs=1e-7)


def test_msd_frames_matches_scalar():
    g = MSDGaussian(0.6, np.array([5.0, 0.0, 0.0]), np.array([0.1, 0.01, 0.01]))
    lf0 = np.random.default_rng(0).normal(5, 0.2, (8, 3))
    voiced = np.array([1, 0, 1, 1, 0, 0, 1, 1], bool)
    expected = [msd_log_prob(x if v else None, g) for x, v in zip(lf0, voiced)]
    np.testing.assert_allclose(msd_log_prob_frames(lf0, voiced, g), expected)


def test_gaussian_log_pdf_against_scipy():
    mean, var = np.array([0.0, 1.0]), np.array([2.0, 0.5])
    x = np.array([[0.3, 0.2], [1.0, -1.0]])
    np.testing.assert_allclose(gaussian_log_pdf(x, mean, var),
                               stats.multivariate_normal(mean, np.diag(var)).logpdf(x))


def test_floors():
    assert StreamGaussian([0.0], [0.0]).variance[0] == 1e-6
    d = DurationGaussian(0.2, 0.0)
    assert d.mean == 1.0 and d.variance == 0.25
    with pytest.raises(ValueError):
        MSDGaussian(1.5, np.zeros(3), np.ones(3))
    with pytest.raises(ValueError):
        StreamGaussian(np.zeros(2), np.ones(3))


# ---------------------------------------------------------------- questions

@pytest.fixture(scope="module")
def questions():
    return generate_question_set()


@pytest.fixture(scope="module")
def sample_labels():
    texts = [
        "type=simple-affirmative-verb {k.a.m.O.l}/NN {b.a.R.i}/NN {y.a.e}/VF",
        "type=simple-affirmative-verb {a.m.i}/PRON {bh.a.t}/NN | {kh.a.i}/VF",
        "type=wh-question {t.u.m.i}/PRON {k.o.th.a.e}/ADV {y.a.b.e}/VF",
    ]
    out = []
    for t in texts:
        out.extend(build_context_labels(parse_tagged_line(t)))
    return out


def test_voiced_plosive_class_matches_phoneme_table():
    # voiced plosives: bilabial, dental, retroflex and velar, each plain and aspirated
    assert phoneme_classes(phoneme_inventory())["C-Voiced-Plosive"] == {
        "b", "bh", "d", "dh", "D", "Dh", "g", "gh"}


def test_front_vowel_class():
    assert phoneme_classes(phoneme_inventory())["V-Front"] == {
        "ae", "e", "i", "ae~", "e~", "i~"}


def test_question_names_present(questions):
    names = {q.name for q in questions}
    for slot in PHONE_KEYS:
        assert f"{slot}-C-Voiced-Plosive" in names
        assert f"{slot}-V-Front" in names
    assert "usy<=5" in names
    assert len(names) == len(questions)


def test_thresholds_for_every_numeric_field(questions):
    by_field = {}
    for q in questions:
        if q.threshold is not None:
            by_field.setdefault(q.field, set()).add(q.threshold)
    for key in NUMERIC_KEYS:
        if key.startswith("sstr"):
            continue
        assert by_field[key] == set(range(1, 11))


def test_every_phoneme_covered_in_every_slot(questions):
    symbols = {p.symbol for p in phoneme_inventory()}
    for slot in PHONE_KEYS:
        covered = set().union(*(q.values for q in questions
                                if q.field == slot and q.values is not None))
        assert symbols <= covered


def test_threshold_question_on_undefined_field_is_no():
    q = Question("pp<=3", "pp", threshold=3)
    lab = ContextLabel("x", "x", "sil", "x", "x")
    assert lab.pp is None and not q.answer(lab)
    assert q.answer(ContextLabel("x", "x", "a", "x", "x", pp=2))


def test_question_needs_one_predicate():
    with pytest.raises(ValueError):
        Question("bad", "p3")


def test_answer_matrix_agrees_with_scalar_answers(questions, sample_labels):
    A = answer_matrix(questions, sample_labels)
    assert A.shape == (len(questions), len(sample_labels))
    rng = np.random.default_rng(0)
    for qi in rng.choice(len(questions), 200, replace=False):
        expected = [questions[qi].answer(lab) for lab in sample_labels]
        assert A[qi].tolist() == expected


# ---------------------------------------------------------------- trees

def _k_tree():
    q = Question("p3-Phone-k", "p3", values=frozenset({"k"}))
    return DecisionTree(2, "spectrum", TreeNode(q, yes=TreeNode(leaf=7), no=TreeNode(leaf=3)))


def test_single_leaf_tree():
    tree = DecisionTree(1, "excitation", TreeNode(leaf=4))
    assert tree_traverse(ContextLabel("x", "x", "a", "x", "x"), tree) == 4
    assert tree.leaves() == [4]


def test_depth_one_tree():
    tree = _k_tree()
    lab_k = ContextLabel("x", "a", "k", "a", "x")
    assert tree_traverse(lab_k, tree) == 7
    assert tree_traverse(lab_k, tree) == 7
    assert tree_traverse(ContextLabel("x", "a", "g", "a", "x"), tree) == 3
    assert sorted(tree.leaves()) == [3, 7] and tree.n_leaves() == 2


def test_tree_partitions_labels(questions, sample_labels):
    # a random 4-level tree: every label lands on exactly one leaf
    rng = np.random.default_rng(5)
    counter = iter(range(100))

    def grow(depth):
        if depth == 0:
            return TreeNode(leaf=next(counter))
        return TreeNode(questions[rng.integers(len(questions))], grow(depth - 1), grow(depth - 1))

    tree = DecisionTree(3, "spectrum", grow(4))
    leaves = set(tree.leaves())
    hits = np.zeros(100, int)
    for lab in sample_labels:
        leaf = tree_traverse(lab, tree)
        assert leaf in leaves
        hits[leaf] += 1
    assert hits.sum() == len(sample_labels)


# ---------------------------------------------------------------- persistence

def _assert_models_equal(a, b):
    assert a.config == b.config and a.windows == b.windows
    assert a.inventory == b.inventory and a.version == b.version
    for s in ("spectrum", "excitation", "duration"):
        assert getattr(a.pools, s) == getattr(b.pools, s)
    assert a.monophones == b.monophones
    assert a.fullcontext == b.fullcontext
    assert a.trees == b.trees
    assert a.gv == b.gv


def test_model_round_trip_is_bit_exact(trained20, tmp_path):
    ms, _ = trained20
    path = tmp_path / "m.bhts"
    save_model_set(ms, path)
    back = load_model_set(path)
    _assert_models_equal(ms, back)
    assert model_set_bytes(back) == path.read_bytes()


def test_model_file_layout(trained20):
    data = model_set_bytes(trained20[0])
    assert data[:6] == b"BHTSM1"
    for tag in (b"CONF", b"WIND", b"POOL", b"MONO", b"FULL", b"TREE", b"GVST"):
        assert tag in data


def test_wrong_magic(tmp_path):
    p = tmp_path / "bad.bhts"
    p.write_bytes(b"RIFF0000WAVE")
    with pytest.raises(ModelFormatError, match="not a model file"):
        load_model_set(p)


@pytest.mark.parametrize("keep", [0.1, 0.5, 0.99])
def test_truncated_model_file(trained20, tmp_path, keep):
    data = model_set_bytes(trained20[0])
    p = tmp_path / "t.bhts"
    p.write_bytes(data[:int(len(data) * keep)])
    with pytest.raises(ModelFormatError):
        load_model_set(p)


def test_corrupt_byte_fails_checksum(trained20, tmp_path):
    data = bytearray(model_set_bytes(trained20[0]))
    data[len(data) // 2] ^= 0xFF
    p = tmp_path / "c.bhts"
    p.write_bytes(bytes(data))
    with pytest.raises(ModelFormatError, match="checksum"):
        load_model_set(p)


def test_version_mismatch(trained20, tmp_path):
    import struct
    import zlib
    data = model_set_bytes(trained20[0])
    body = data[:6] + struct.pack("<H", 99) + data[8:-4]
    p = tmp_path / "v.bhts"
    p.write_bytes(body + struct.pack("<I", zlib.crc32(body)))
    with pytest.raises(ModelFormatError, match="version"):
        load_model_set(p)


def test_model_for_unseen_label_uses_trees(trained20):
    ms, _ = trained20
    lab = ContextLabel("x", "x", "a", "x", "x", usy=99)
    hmm = ms.model_for(lab)
    for (state, stream), tree in ms.trees.items():
        assert hmm.ids(stream)[state - 1] == tree_traverse(lab, tree)
