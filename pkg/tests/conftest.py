import numpy as np
import pytest

from gpensemble.dataset import Dataset

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_data():
    """Noisy quadratic in two variables, 60 rows."""
    gen = np.random.default_rng(7)
    X = gen.uniform(-2, 2, size=(60, 2))
    y = X[:, 0] ** 2 + X[:, 0] * X[:, 1] + gen.normal(0, 0.1, 60)
    return Dataset(X, y)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
