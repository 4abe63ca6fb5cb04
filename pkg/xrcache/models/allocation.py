from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import ConfigurationError
from .environment import RateMap


class TradeoffMode(str, Enum):
    """Named settings of the local/global caching trade-off."""

    MULTICAST_AWARE = "multicast_aware"
    LOCAL_FIRST = "local_first"
    UNIFORM = "uniform"


@dataclass(frozen=True, eq=False)
class AllocationProblem:
    rate_map: RateMap
    total_memory: float
    user_count: int
    tradeoff: float

    def __post_init__(self):
        if len(self.rate_map) == 0:
            raise ConfigurationError("rate map is empty", field="rates")
        if not self.total_memory > 0:
            raise ConfigurationError(f"total memory must be positive, got {self.total_memory}",
                                     field="total_memory")
        if self.user_count < 1:
            raise ConfigurationError("user_count must be at least 1", field="user_count")
        if not self.tradeoff > 0:
            raise ConfigurationError(f"tradeoff must be positive, got {self.tradeoff}", field="tradeoff")

    @property
    def state_count(self) -> int:
        return len(self.rate_map)

    @property
    def rates(self) -> np.ndarray:
        return self.rate_map.rates


@dataclass(frozen=True, eq=False)
class MemoryAllocation:
    """Per-state cache fractions and the quantities of the allocation objective."""

    fractions: np.ndarray
    user_count: int
    tradeoff: float
    gamma: float

    @property
    def m_bar(self) -> float:
        return float(np.min(self.fractions))

    @property
    def gains(self) -> np.ndarray:
        return self.user_count * self.fractions

    @property
    def t_bar(self) -> float:
        return self.user_count * self.m_bar

    @property
    def objective(self) -> float:
        return self.gamma / (self.m_bar + self.tradeoff)

    @property
    def state_count(self) -> int:
        return int(self.fractions.shape[0])

    @property
    def used_memory(self) -> float:
        return float(np.sum(self.fractions))

    def to_dict(self):
        return {
            "m": [float(x) for x in self.fractions],
            "t": [float(x) for x in self.gains],
            "m_bar": self.m_bar,
            "t_bar": self.t_bar,
            "gamma": self.gamma,
            "tradeoff": self.tradeoff,
            "objective": self.objective,
        }
