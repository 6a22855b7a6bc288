import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

from flowcat import cellspace as cs  # noqa: E402
from flowcat.precubical import grid_precubical, realize_flow  # noqa: E402
from flowcat.pv import swiss_flag, to_precubical  # noqa: E402


@pytest.fixture(scope="session")
def swiss_presentation():
    return realize_flow(to_precubical(swiss_flag()))


@pytest.fixture(scope="session")
def swiss_corner():
    """The filled 3x3-vertex corner of the two-lock example (no forbidden cell)."""
    k = grid_precubical((2, 2), max_dim=2)
    return realize_flow(k)


@pytest.fixture
def s0():
    return cs.sphere_disk(0, "sphere")


@pytest.fixture
def d1():
    return cs.sphere_disk(1, "disk")
