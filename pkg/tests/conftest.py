import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_l1_point(rng, n, mass=None):
    """Random point of the l1 ball; ``mass`` fixes its l1 norm."""
    x = rng.standard_normal(n)
    m = rng.uniform(0, 1) if mass is None else mass
    return m * x / np.abs(x).sum()


def random_simplex_point(rng, n, sparsity=0.0):
    x = rng.exponential(size=n)
    x[rng.uniform(size=n) < sparsity] = 0.0
    if x.sum() == 0:
        x[rng.integers(n)] = 1.0
    return x / x.sum()
