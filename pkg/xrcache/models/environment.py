from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ConfigurationError, DomainError

_LATTICE_TOL = 1e-9


def lattice_count(length: float, tile: float) -> Optional[int]:
    """Number of tiles along one side, or None when the side is not a multiple of the tile."""
    ratio = length / tile
    count = round(ratio)
    if count < 1 or abs(ratio - count) > _LATTICE_TOL * max(1.0, ratio):
        return None
    return int(count)


class EnvironmentConfig(BaseModel):
    """Room geometry, radio parameters and seeds of one scenario."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    room_width_m: float = Field(10.0, gt=0)
    room_depth_m: float = Field(10.0, gt=0)
    tile_size_m: float = Field(1.0, gt=0)
    tx_position: Optional[Tuple[float, float, float]] = None
    tx_height_m: float = Field(5.0, gt=0)
    antenna_count: int = Field(4, ge=1)
    spatial_multiplexing_gain: int = Field(2, ge=1)
    carrier_frequency_ghz: float = Field(3.5, gt=0)
    pathloss_exponent: float = Field(3.0, gt=0)
    shadowing_model: Literal["lognormal", "attenuated"] = "lognormal"
    shadowing_std_db: float = Field(8.0, ge=0)
    attenuated_states: int = Field(0, ge=0)
    attenuation_db: float = Field(10.0, ge=0)
    noise_power: float = Field(1.0, gt=0)
    border_snr_db: float = 0.0
    prelog_factor: float = Field(1.0, gt=0)
    bandwidth: float = Field(1.0, gt=0)
    file_size: float = Field(1.0, gt=0)
    rng_seed: int = 0
    rate_samples: int = Field(1000, ge=1)

    @model_validator(mode="after")
    def _check_geometry(self) -> "EnvironmentConfig":
        if self.spatial_multiplexing_gain > self.antenna_count:
            raise ValueError(
                f"spatial_multiplexing_gain ({self.spatial_multiplexing_gain}) "
                f"exceeds antenna_count ({self.antenna_count})"
            )
        columns = lattice_count(self.room_width_m, self.tile_size_m)
        rows = lattice_count(self.room_depth_m, self.tile_size_m)
        if columns is None or rows is None:
            raise ValueError("room dimensions must be integer multiples of tile_size_m")
        if self.attenuated_states > columns * rows:
            raise ValueError(f"attenuated_states exceeds the {columns * rows} states of the room")
        # users stand on the floor, so a transmitter above it keeps every d_s > 0
        if self.tx_position is not None and not self.tx_position[2] > 0:
            raise ValueError("tx_position height must be positive")
        return self

    @property
    def grid_shape(self) -> Tuple[int, int]:
        """(rows, columns) of the tile lattice."""
        columns = lattice_count(self.room_width_m, self.tile_size_m)
        rows = lattice_count(self.room_depth_m, self.tile_size_m)
        if columns is None or rows is None:
            raise ConfigurationError(
                "room dimensions must be integer multiples of tile_size_m", field="tile_size_m"
            )
        return rows, columns

    @property
    def state_count(self) -> int:
        rows, columns = self.grid_shape
        return rows * columns

    @property
    def transmitter(self) -> Tuple[float, float, float]:
        if self.tx_position is not None:
            return tuple(float(x) for x in self.tx_position)
        return (self.room_width_m / 2.0, self.room_depth_m / 2.0, self.tx_height_m)

    @property
    def rate_scale(self) -> float:
        return self.prelog_factor * self.bandwidth / self.file_size

    @classmethod
    def desk(cls, **overrides) -> "EnvironmentConfig":
        """10x10 m room with 1 m tiles and a 4-antenna transmitter."""
        values = dict(room_width_m=10.0, room_depth_m=10.0, tile_size_m=1.0, antenna_count=4,
                      spatial_multiplexing_gain=2, shadowing_std_db=8.0)
        values.update(overrides)
        return cls(**values)

    @classmethod
    def full(cls, **overrides) -> "EnvironmentConfig":
        """30x30 m room with 1 m tiles and a 32-antenna transmitter (slow)."""
        values = dict(room_width_m=30.0, room_depth_m=30.0, tile_size_m=1.0, antenna_count=32,
                      spatial_multiplexing_gain=2, shadowing_std_db=10.0)
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class State:
    index: int
    center: Tuple[float, float, float]
    distance: float
    shadowing_db: float

    def to_dict(self):
        return {
            "index": self.index,
            "center": list(self.center),
            "distance": self.distance,
            "shadowing_db": self.shadowing_db,
        }


@dataclass(frozen=True, eq=False)
class StateGrid:
    """Tile lattice of a room, row-major: index = row * columns + column."""

    config: EnvironmentConfig
    centers: np.ndarray
    distances: np.ndarray
    shadowing_db: np.ndarray

    def __len__(self) -> int:
        return int(self.distances.shape[0])

    def state(self, index: int) -> State:
        if not 0 <= int(index) < len(self):
            raise DomainError(f"unknown state index {index} (grid has {len(self)} states)")
        index = int(index)
        return State(
            index=index,
            center=tuple(float(x) for x in self.centers[index]),
            distance=float(self.distances[index]),
            shadowing_db=float(self.shadowing_db[index]),
        )

    @property
    def states(self) -> Tuple[State, ...]:
        return tuple(self.state(s) for s in range(len(self)))

    @property
    def farthest_state(self) -> int:
        # argmax returns the lowest index among ties
        return int(np.argmax(self.distances))


@dataclass(frozen=True, eq=False)
class RateMap:
    """Expected interference-free throughput per state, files/second."""

    rates: np.ndarray

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        if rates.ndim != 1 or rates.size == 0:
            raise ConfigurationError("rate map must be a nonempty vector", field="rates")
        if not np.all(np.isfinite(rates)) or np.any(rates <= 0):
            raise ConfigurationError("every rate must be finite and positive", field="rates")
        object.__setattr__(self, "rates", rates)

    def __len__(self) -> int:
        return int(self.rates.shape[0])

    def __getitem__(self, index: int) -> float:
        return float(self.rates[index])

    def scaled(self, factor: float) -> "RateMap":
        return RateMap(self.rates * factor)

    def to_dict(self):
        return {"rates": [float(r) for r in self.rates]}


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One complex channel row per user, shape (K, L)."""

    channels: np.ndarray
    user_states: Tuple[int, ...]

    def __post_init__(self):
        channels = np.atleast_2d(np.asarray(self.channels, dtype=complex))
        if channels.shape[0] != len(self.user_states):
            raise DomainError("one channel vector per user is required")
        if not np.all(np.isfinite(channels)):
            raise DomainError("channel entries must be finite")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "user_states", tuple(int(s) for s in self.user_states))

    @property
    def user_count(self) -> int:
        return len(self.user_states)

    @property
    def antenna_count(self) -> int:
        return int(self.channels.shape[1])

    def gains(self) -> np.ndarray:
        return np.sum(np.abs(self.channels) ** 2, axis=1)

    def to_dict(self):
        return {
            "user_states": list(self.user_states),
            "channels": [[[float(z.real), float(z.imag)] for z in row] for row in self.channels],
        }


def db_to_linear(value_db):
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)
