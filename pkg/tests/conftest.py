import numpy as np
import pytest
from hypothesis import strategies as st

from qfisher.matrix_core import validate_density
from qfisher.sampling import random_density, random_hermitian, random_traceless

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def qubit_state():
    """The diag(0.25, 0.75) state used throughout the worked examples."""
    return validate_density(np.diag([0.25, 0.75]))


# hypothesis drives the seed; numpy builds the instance
seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=6)


def instance(seed, n):
    rng = np.random.default_rng(seed)
    return rng, random_density(n, rng), random_traceless(n, rng)


def hermitian(seed, n):
    return random_hermitian(n, np.random.default_rng(seed))


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
