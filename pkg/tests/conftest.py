import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def two_point():
    from chainclt.function_class import bundled_classes
    return bundled_classes()["two_point"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
