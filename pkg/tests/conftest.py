import numpy as np
import pytest

from rissm import build_constellation


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def bpsk():
    return build_constellation("psk", 2)


@pytest.fixture(scope="session")
def qpsk():
    return build_constellation("psk", 4)


def sample_mean_se(x):
    """Sample mean and its standard error."""
    x = np.asarray(x, dtype=float)
    return x.mean(), x.std(ddof=1) / np.sqrt(x.size)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
