import numpy as np
import pytest

from monosys import ComponentwiseNonlinearity, ParameterSpace, SymmetricMatrix

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def scalar_two():
    return SymmetricMatrix.from_dense([[2.0]])


@pytest.fixture
def unit_box():
    return ParameterSpace.box(0.5, 2.0, m=1)


def custom_h(func, n=1, space=None, derivative=None):
    """Bare nonlinearity without certificates, for falsifier examples."""
    space = ParameterSpace.box(0.5, 2.0, m=n) if space is None else space
    return ComponentwiseNonlinearity(n=n, func=func, space=space, derivative=derivative)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
