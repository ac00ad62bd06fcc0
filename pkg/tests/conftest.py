import numpy as np
import pytest

from jc_echo import SystemParams, build_layout


@pytest.fixture
def layout():
    return build_layout(1, 15)


@pytest.fixture
def params(layout):
    return SystemParams(layout=layout)


@pytest.fixture
def rng():
    return np.random.default_rng(20010817)


def random_density_matrix(rng, dim):
    """Random full-rank state: normalized A A† for complex Gaussian A."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = a @ a.conj().T
    return m / np.trace(m).real
