import numpy as np
import pytest

from vibrodimer.hilbert import HilbertSpace, pure_state
from vibrodimer.model import ModelParams

BELL_PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def two_qubits():
    return HilbertSpace.of(a=2, b=2)


@pytest.fixture
def bell(two_qubits):
    return pure_state(two_qubits, BELL_PHI_PLUS)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
