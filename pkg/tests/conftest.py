"""Suite-wide configuration."""

import os

import pytest

try:
    from hypothesis import HealthCheck, settings

    # Property tests call quadrature-backed code whose first call can be
    # slow; wall-clock deadlines would make them flaky.
    settings.register_profile(
        "movingwell", deadline=None,
        suppress_health_check=[HealthCheck.too_slow])
    settings.load_profile("movingwell")
except ImportError:  # pragma: no cover
    pass

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


@pytest.fixture(scope="session")
def faddeyeva_grid_path():
    """Frozen arbitrary-precision reference grid (see tests/_wref.py)."""
    path = os.path.join(DATA_DIR, "faddeyeva_grid.npz")
    if not os.path.exists(path):
        pytest.skip("reference grid missing; run `python tests/_wref.py`")
    return path
