import numpy as np
import pytest

from csreg import simulation_model, simulate


@pytest.fixture(scope="session")
def model():
    return simulation_model()


@pytest.fixture()
def sample_200(model):
    return simulate(model, 200, seed=11)


@pytest.fixture()
def sample_1000(model):
    return simulate(model, 1000, seed=7)


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
