import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from solarcast.series import SynthConfig, generate_synthetic
from solarcast.solar import SiteSpec

SITE_LAT = 41.917


@pytest.fixture(scope="session")
def site():
    return SiteSpec.from_degrees(SITE_LAT)


@pytest.fixture(scope="session")
def synth_19y():
    return generate_synthetic(SynthConfig(n_years=19, latitude_deg=SITE_LAT, seed=7))


@pytest.fixture(scope="session")
def synth_noise_free():
    cfg = SynthConfig(
        n_years=3, latitude_deg=SITE_LAT, cloud_std=0.0, seasonal_amplitude=0.0, seed=1
    )
    return generate_synthetic(cfg)
