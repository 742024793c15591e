import numpy as np
import pytest

from app.schemas.probe import LossChannelPair
from app.schemas.scene import GridSpec


@pytest.fixture
def default_pair() -> LossChannelPair:
    return LossChannelPair(tau0=0.95, tau1=0.4, mean_photons=8.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def grid20() -> GridSpec:
    return GridSpec(side=20)


@pytest.fixture
def grid50() -> GridSpec:
    return GridSpec(side=50)
