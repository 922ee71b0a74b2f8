import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_match(tmp_path_factory):
    """A 40 s broadcast with one goal, written once per session."""
    from soccer_highlights.synthetic import write_match_fixture

    return write_match_fixture(tmp_path_factory.mktemp("small_match"), duration=40, width=176, height=144,
                               seed=3, goals=(0.45,))
