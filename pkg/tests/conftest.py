import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from modgauss.dilation import abstract_subspace, orthogonal_dilation

settings.register_profile(
    "default",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def rotation_generator(b: float) -> np.ndarray:
    return np.array([[0.0, b], [-b, 0.0]])


@pytest.fixture
def b_half():
    """2-dim abstract subspace with A = 1 and B = [[0, 1/2], [-1/2, 0]]."""
    return abstract_subspace(np.eye(2), rotation_generator(0.5))


@pytest.fixture
def b_half_subspace(b_half):
    return orthogonal_dilation(b_half).subspace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
