import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# One profile for the whole suite: derandomized so CI failures replay
# exactly, and a bounded example count so the slow simulation-backed
# properties stay within the suite's time budget.
settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
