import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nvspin import RateParams, SpinParams


@pytest.fixture
def gs_bulk():
    return SpinParams(d_zfs=2870.0, e_strain=0.0, g_factor=2.0028)


@pytest.fixture
def es_bulk():
    return SpinParams(d_zfs=1423.0, e_strain=0.0, g_factor=2.01)


@pytest.fixture
def default_rates():
    return RateParams()
