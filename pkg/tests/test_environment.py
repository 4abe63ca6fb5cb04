import numpy as np
import pytest
from pydantic import ValidationError

from xrcache.errors import ConfigurationError, DomainError
from xrcache.models.environment import ChannelRealization, EnvironmentConfig, RateMap
from xrcache.services.environment import (
    border_snr_db,
    build_grid,
    calibrate_power,
    draw_channels,
    estimate_rate_map,
)


def test_grid_is_row_major_with_one_state_per_tile():
    config = EnvironmentConfig(room_width_m=4.0, room_depth_m=2.0, tile_size_m=1.0)
    grid = build_grid(config)
    assert config.grid_shape == (2, 4)
    assert len(grid) == 8
    # index = row * columns + column
    assert grid.state(5).center[:2] == (1.5, 1.5)
    assert grid.state(0).center[:2] == (0.5, 0.5)


def test_room_must_be_a_whole_number_of_tiles():
    with pytest.raises(ValidationError):
        EnvironmentConfig(room_width_m=4.5, room_depth_m=4.0, tile_size_m=1.0)


def test_alpha_cannot_exceed_antennas():
    with pytest.raises(ValidationError):
        EnvironmentConfig(antenna_count=2, spatial_multiplexing_gain=3)


def test_unknown_state_index(small_environment):
    grid = build_grid(small_environment)
    with pytest.raises(DomainError):
        grid.state(len(grid))


def test_shadowing_is_frozen_by_seed(small_environment):
    first = build_grid(small_environment).shadowing_db
    again = build_grid(small_environment).shadowing_db
    other = build_grid(small_environment.model_copy(update={"rng_seed": 4})).shadowing_db
    np.testing.assert_array_equal(first, again)
    assert not np.allclose(first, other)


def test_attenuated_shadowing_blocks_exact_count():
    config = EnvironmentConfig(room_width_m=4.0, room_depth_m=4.0, shadowing_model="attenuated",
                               attenuated_states=5, attenuation_db=12.0)
    shadowing = build_grid(config).shadowing_db
    assert np.count_nonzero(shadowing) == 5
    assert set(np.unique(shadowing)) == {0.0, 12.0}


def test_power_calibration_hits_border_snr(small_environment):
    config = small_environment.model_copy(update={"border_snr_db": 7.5})
    grid = build_grid(config)
    power = calibrate_power(config, grid)
    assert border_snr_db(power, grid, config) == pytest.approx(7.5)


def test_rates_fall_with_distance_without_shadowing(small_environment):
    config = small_environment.model_copy(update={"shadowing_std_db": 0.0})
    grid = build_grid(config)
    rate_map = estimate_rate_map(grid, config, n_samples=200)
    nearest, farthest = int(np.argmin(grid.distances)), grid.farthest_state
    assert rate_map[nearest] > rate_map[farthest] > 0


def test_rate_map_is_deterministic(small_environment):
    grid = build_grid(small_environment)
    first = estimate_rate_map(grid, small_environment)
    second = estimate_rate_map(grid, small_environment)
    np.testing.assert_array_equal(first.rates, second.rates)


def test_rate_map_scales_with_prelog_and_bandwidth(small_environment):
    grid = build_grid(small_environment)
    base = estimate_rate_map(grid, small_environment)
    scaled_config = small_environment.model_copy(update={"prelog_factor": 0.5, "bandwidth": 4.0})
    scaled = estimate_rate_map(grid, scaled_config)
    np.testing.assert_allclose(scaled.rates, 2.0 * base.rates)


def test_channels_follow_the_rng(small_environment):
    grid = build_grid(small_environment)
    a = draw_channels(grid, [0, 5, 9], small_environment, np.random.default_rng(1))
    b = draw_channels(grid, [0, 5, 9], small_environment, np.random.default_rng(1))
    assert a.channels.shape == (3, small_environment.antenna_count)
    np.testing.assert_array_equal(a.channels, b.channels)
    assert a.user_states == (0, 5, 9)


def test_channel_realization_needs_one_row_per_user():
    with pytest.raises(DomainError):
        ChannelRealization(channels=np.ones((2, 4)), user_states=(0,))


@pytest.mark.parametrize("rates", [[], [1.0, 0.0], [1.0, float("nan")]])
def test_rate_map_rejects_bad_rates(rates):
    with pytest.raises(ConfigurationError):
        RateMap(np.array(rates))


def test_explicit_zero_samples_is_rejected(small_environment):
    grid = build_grid(small_environment)
    with pytest.raises(DomainError):
        estimate_rate_map(grid, small_environment, n_samples=0)
    assert len(estimate_rate_map(grid, small_environment, n_samples=1)) == len(grid)


@pytest.mark.parametrize("update", [{"tx_height_m": 0.0}, {"tx_position": (2.0, 2.0, 0.0)}])
def test_transmitter_must_be_above_the_floor(update):
    with pytest.raises(ValidationError):
        EnvironmentConfig(room_width_m=4.0, room_depth_m=4.0, **update)


@pytest.mark.parametrize("seed", range(20))
def test_calibration_round_trip_on_random_rooms(seed):
    rng = np.random.default_rng(seed)
    tile = float(rng.choice([0.5, 1.0, 2.0]))
    config = EnvironmentConfig(
        room_width_m=tile * int(rng.integers(1, 9)),
        room_depth_m=tile * int(rng.integers(1, 9)),
        tile_size_m=tile,
        tx_height_m=float(rng.uniform(0.5, 6.0)),
        carrier_frequency_ghz=float(rng.uniform(1.0, 60.0)),
        pathloss_exponent=float(rng.uniform(2.0, 4.0)),
        noise_power=float(rng.uniform(0.1, 10.0)),
        border_snr_db=float(rng.uniform(-10.0, 20.0)),
        rng_seed=seed,
    )
    grid = build_grid(config)
    assert np.all(grid.distances > 0)
    assert grid.distances[grid.farthest_state] == pytest.approx(np.max(grid.distances))
    power = calibrate_power(config, grid)
    assert abs(border_snr_db(power, grid, config) - config.border_snr_db) <= 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_shadowless_rates_never_grow_with_distance(seed):
    rng = np.random.default_rng(seed)
    config = EnvironmentConfig(room_width_m=6.0, room_depth_m=6.0, tile_size_m=1.0,
                               tx_height_m=float(rng.uniform(1.0, 4.0)), shadowing_std_db=0.0,
                               rng_seed=seed)
    grid = build_grid(config)
    rates = estimate_rate_map(grid, config, n_samples=100).rates
    # in-tile positions move a user by at most half a tile diagonal
    margin = config.tile_size_m * np.sqrt(2.0)
    for i in range(len(grid)):
        for j in range(len(grid)):
            if grid.distances[j] - grid.distances[i] >= margin:
                assert rates[i] >= rates[j]
