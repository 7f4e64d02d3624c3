import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "horolab",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("horolab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_disc_points(rng, n, radius=0.95):
    """Uniform points of the disc of the given radius."""
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))
