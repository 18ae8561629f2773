from pathlib import Path

import numpy as np
import pytest

from streamsel.data import normalize_features
from streamsel.synthetic import make_planted

DATA = Path(__file__).parent / "data"

# filled by test_acceptance.py, one line per exit criterion
CRITERIA: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def planted():
    p = make_planted(seed=0)
    ds, _ = normalize_features(p.dataset)
    return p, ds


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ionosphere_path():
    return DATA / "ionosphere.csv"
