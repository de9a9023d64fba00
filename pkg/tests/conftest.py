import copy
import numpy as np
import pytest
from pysgdct import ModelSpec

QUADRATIC_CONFIG = {
    "name": "quadratic-small",
    "model": {"name": "quadratic", "sigma": 1.0},
    "N": 5,
    "M": 4,
    "dt": 0.1,
    "steps": 30,
    "truth": [{"until_step": 30, "theta": [1.2, 0.5]}],
    "theta_init": {"kind": "uniform", "low": [1.5, 1.0], "high": [2.5, 1.5]},
    "seeds": [0, 1, 2]
}


@pytest.fixture
def quadratic():
    return ModelSpec.get("quadratic", sigma = 1.0)


@pytest.fixture
def kuramoto():
    return ModelSpec.get("kuramoto", sigma = 1.0)


@pytest.fixture
def fhn():
    return ModelSpec.get("fitzhugh-nagumo", sigma = 1.0)


@pytest.fixture
def config_data():
    """
    A small quadratic configuration that runs in well under a second.
    """
    return copy.deepcopy(QUADRATIC_CONFIG)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
