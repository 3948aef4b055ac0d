import math

import pytest
from hypothesis import HealthCheck, settings

from timemap.emden import Interval

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def unit():
    return Interval(0.0, 1.0)


@pytest.fixture(scope="session")
def log_annulus():
    # a = 1, b = e: reduced interval (-1, 0)
    return 1.0, math.e
