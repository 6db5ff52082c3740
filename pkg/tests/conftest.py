import numpy as np
import pytest

from hdcnav import build_kernel
from hdcnav.calibration import fit_gain, sweep


@pytest.fixture(scope="session")
def kernel():
    return build_kernel()


@pytest.fixture(scope="session")
def gain(kernel):
    return fit_gain(sweep(kernel), kernel=kernel)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
