import numpy as np
import pytest

from hyperdecay.presets import PRESETS


@pytest.fixture(scope="session")
def stacks():
    return {name: pm.build() for name, pm in PRESETS.items()}


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
