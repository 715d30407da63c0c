from pathlib import Path

import pytest

from bengali_hts.corpus import generate_synthetic_corpus, load_corpus
from bengali_hts.training import TrainingConfig, prepare_utterances, train_models

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def mos_csv():
    return DATA / "listening_test_mos.csv"


@pytest.fixture(scope="session")
def corpus20(tmp_path_factory):
    """The 20-utterance synthetic corpus (seed 7) on disk."""
    root = tmp_path_factory.mktemp("corpus20")
    generate_synthetic_corpus(root, n=20, seed=7)
    return root


@pytest.fixture(scope="session")
def utts20(corpus20):
    return prepare_utterances(load_corpus(corpus20))


@pytest.fixture(scope="session")
def trained20(utts20):
    """Small but complete model set shared by synthesis tests (do not mutate)."""
    cfg = TrainingConfig(monophone_iterations=3, fullcontext_iterations=1, tied_iterations=1)
    return train_models(utts20, cfg)


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, ok, detail)``."""
    results = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(n, ok, detail=""):
        results[n] = (bool(ok), detail)
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
