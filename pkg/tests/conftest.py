import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mdlsys.registry import (
    a_obs_pair,
    a_stable_pair,
    gleason_rational_pair,
    gleason_span_pair,
    not_shift_inv_pair,
    reverse_stein_pair,
)

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def rs_pair():
    return reverse_stein_pair()


@pytest.fixture
def astable_pair():
    return a_stable_pair()


@pytest.fixture
def aobs_pair():
    return a_obs_pair()


@pytest.fixture
def nsi_pair():
    return not_shift_inv_pair()


@pytest.fixture
def span_pair_family():
    return gleason_span_pair


@pytest.fixture
def rational_pair_family():
    return gleason_rational_pair
