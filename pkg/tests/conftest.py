import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qcmeasure import MatrixFamily  # noqa: E402

R = np.array([[0.0, -1.0], [1.0, 0.0]])
SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]])
UNITS = [np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])]


@pytest.fixture
def rotation():
    return MatrixFamily([R])


@pytest.fixture
def shear():
    return MatrixFamily([SHEAR])


@pytest.fixture
def identity2():
    return MatrixFamily([np.eye(2)])


@pytest.fixture
def matrix_units():
    return MatrixFamily(UNITS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
