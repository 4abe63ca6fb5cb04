import numpy as np
import pytest

from xrcache.models.environment import EnvironmentConfig, RateMap
from xrcache.models.scenario import Scenario
from xrcache.services.examples import TABLE_MEMORY, TABLE_RATES
from xrcache.utils import cache


@pytest.fixture(autouse=True)
def _fresh_cache():
    cache.clear()
    yield
    cache.clear()


@pytest.fixture
def table_rates():
    return RateMap(np.array(TABLE_RATES))


@pytest.fixture
def table_memory():
    return TABLE_MEMORY


@pytest.fixture
def small_environment():
    """4x4 m room, 16 states, 2 antennas; fast enough for end-to-end drops."""
    return EnvironmentConfig(room_width_m=4.0, room_depth_m=4.0, tile_size_m=1.0, tx_height_m=3.0,
                             antenna_count=2, spatial_multiplexing_gain=2, shadowing_std_db=4.0,
                             rate_samples=50, rng_seed=3)


@pytest.fixture
def small_scenario(small_environment):
    return Scenario(
        environment=small_environment,
        allocation={"user_count": 3, "memory_ratio": 0.33},
        beamforming={"method": "zero_forcing", "inner_tol": 1e-3},
        experiment={"drops": 3, "master_seed": 11,
                    "schemes": ["proposed_multicast_aware", "ms_uniform"]},
    )
