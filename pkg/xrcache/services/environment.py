"""Room model: state lattice, path loss, power calibration, fading and expected rates."""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..errors import DomainError
from ..models.environment import (
    ChannelRealization,
    EnvironmentConfig,
    RateMap,
    State,
    StateGrid,
    db_to_linear,
    linear_to_db,
)

logger = logging.getLogger(__name__)

# Free-space constant of the indoor model, carrier frequency in GHz.
PATHLOSS_CONSTANT_DB = 32.4


# ============================================================================
# Geometry
# ============================================================================

def _draw_shadowing(config: EnvironmentConfig, state_count: int) -> np.ndarray:
    rng = np.random.default_rng(config.rng_seed)
    if config.shadowing_model == "attenuated":
        shadowing = np.zeros(state_count)
        if config.attenuated_states:
            blocked = rng.choice(state_count, size=config.attenuated_states, replace=False)
            shadowing[blocked] = config.attenuation_db
        return shadowing
    if config.shadowing_std_db == 0:
        return np.zeros(state_count)
    return rng.normal(0.0, config.shadowing_std_db, size=state_count)


def build_grid(config: EnvironmentConfig) -> StateGrid:
    """
    Lay the tile lattice over the room and freeze one shadowing draw per state.

    Raises:
        ConfigurationError: room sides are not multiples of the tile size.
    """
    rows, columns = config.grid_shape
    tile = config.tile_size_m
    column_idx, row_idx = np.meshgrid(np.arange(columns), np.arange(rows))
    centers = np.column_stack([
        (column_idx.ravel() + 0.5) * tile,
        (row_idx.ravel() + 0.5) * tile,
        np.zeros(rows * columns),
    ])
    distances = np.linalg.norm(centers - np.asarray(config.transmitter), axis=1)
    shadowing = _draw_shadowing(config, rows * columns)
    logger.debug("Built %dx%d state grid (S=%d)", rows, columns, rows * columns)
    return StateGrid(config=config, centers=centers, distances=distances, shadowing_db=shadowing)


# ============================================================================
# Path loss and calibration
# ============================================================================

def pathloss_db_at(distance, shadowing_db, config: EnvironmentConfig):
    """Vectorized path loss for raw distances; no domain checks."""
    distance = np.asarray(distance, dtype=float)
    return (
        PATHLOSS_CONSTANT_DB
        + 20.0 * math.log10(config.carrier_frequency_ghz)
        + 10.0 * config.pathloss_exponent * np.log10(distance)
        + shadowing_db
    )


def pathloss_db(state: State, config: EnvironmentConfig) -> float:
    if state.distance <= 0:
        raise DomainError(f"state {state.index} has non-positive distance {state.distance}")
    return float(pathloss_db_at(state.distance, state.shadowing_db, config))


def calibrate_power(config: EnvironmentConfig, grid: StateGrid) -> float:
    """Transmit power that puts the farthest state (shadowing ignored) at border_snr_db."""
    border = grid.state(grid.farthest_state)
    loss_db = pathloss_db(State(border.index, border.center, border.distance, 0.0), config)
    power = config.noise_power * float(db_to_linear(config.border_snr_db + loss_db))
    logger.debug("Calibrated P_T=%.4g for border state %d (PL=%.2f dB)", power, border.index, loss_db)
    return power


def border_snr_db(transmit_power: float, grid: StateGrid, config: EnvironmentConfig) -> float:
    border = grid.state(grid.farthest_state)
    loss_db = pathloss_db(State(border.index, border.center, border.distance, 0.0), config)
    return float(linear_to_db(transmit_power / config.noise_power)) - loss_db


# ============================================================================
# Fading
# ============================================================================

def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def draw_channels(
    grid: StateGrid,
    user_states: Sequence[int],
    config: EnvironmentConfig,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Rayleigh channels scaled by the large-scale gain of each user's state."""
    states = [grid.state(s) for s in user_states]
    loss_db = np.array([pathloss_db(state, config) for state in states])
    gains = np.sqrt(db_to_linear(-loss_db))
    fading = _complex_gaussian(rng, (len(states), config.antenna_count))
    return ChannelRealization(channels=gains[:, None] * fading, user_states=tuple(user_states))


def expected_rate(snr_samples, scale: float = 1.0) -> float:
    return float(scale * np.mean(np.log2(1.0 + np.asarray(snr_samples, dtype=float))))


def estimate_rate_map(
    grid: StateGrid,
    config: EnvironmentConfig,
    n_samples: Optional[int] = None,
    transmit_power: Optional[float] = None,
) -> RateMap:
    """
    Monte Carlo estimate of the expected interference-free rate of every state.

    Positions are uniform inside each tile and the same offsets and fading
    draws are reused for every state, so differences between states come from
    geometry and shadowing only.
    """
    if n_samples is None:
        n_samples = config.rate_samples
    if n_samples < 1:
        raise DomainError(f"n_samples must be at least 1, got {n_samples}")
    if transmit_power is None:
        transmit_power = calibrate_power(config, grid)

    rng = np.random.default_rng([config.rng_seed, 1])
    half = config.tile_size_m / 2.0
    offsets = rng.uniform(-half, half, size=(n_samples, 2))
    # ||g||^2 of an L-dimensional CN(0, I) vector is Gamma(L, 1)
    fading_energy = rng.gamma(config.antenna_count, 1.0, size=n_samples)

    tx = np.asarray(config.transmitter)
    rates = np.empty(len(grid))
    for s in range(len(grid)):
        points = grid.centers[s, :2] + offsets
        distances = np.sqrt(np.sum((points - tx[:2]) ** 2, axis=1) + (grid.centers[s, 2] - tx[2]) ** 2)
        loss_db = pathloss_db_at(distances, grid.shadowing_db[s], config)
        snr = transmit_power * db_to_linear(-loss_db) * fading_energy / config.noise_power
        rates[s] = expected_rate(snr, config.rate_scale)
    logger.info("Estimated rate map over %d states (%d samples each)", len(grid), n_samples)
    return RateMap(rates)
