import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bernstein_helmholtz import bernstein as bn

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalogue():
    return bn.catalogue()


@pytest.fixture(scope="session")
def nonconstant(catalogue):
    return [f for f in catalogue if not f.is_constant]


@pytest.fixture(scope="session")
def with_triple(catalogue):
    return [f for f in catalogue if f.triple is not None]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
