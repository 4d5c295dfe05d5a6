import os

import numpy as np
import pytest

from stumpspeech import kernels
from stumpspeech.corpus import bundled_corpus
from stumpspeech.normalize import normalize

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def golden_pairs():
    with open(os.path.join(GOLDEN, "raw.txt"), encoding="utf-8", newline="") as f:
        raw = f.read().split("\n")[:-1]
    with open(os.path.join(GOLDEN, "clean.txt"), encoding="utf-8", newline="") as f:
        clean = f.read().split("\n")[:-1]
    assert len(raw) == len(clean)
    return list(zip(raw, clean))


def available_backends():
    out = ["python"]
    try:
        kernels.get_backend("cython")
        out.append("cython")
    except ImportError:
        pass
    return out


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def corpus():
    return bundled_corpus()


@pytest.fixture(scope="session")
def cleaned(corpus):
    return [normalize(t) for t in corpus.texts]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s[2:4])):
            terminalreporter.write_line(line)
