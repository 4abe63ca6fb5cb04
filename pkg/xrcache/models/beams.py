from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config import Config


class BeamformingOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    method: Literal["wmm_sca", "zero_forcing", "mrt"] = "wmm_sca"
    max_iters: int = Field(default_factory=lambda: Config.SCA_MAX_ITERS, ge=1)
    tol: float = Field(default_factory=lambda: Config.SCA_TOL, ge=0)
    inner_tol: float = Field(default_factory=lambda: Config.SCA_INNER_TOL, gt=0)


@dataclass(frozen=True, eq=False)
class BeamProblem:
    """
    One transmission seen by the precoder design.

    Codeword j is desired by receiver i when j is in desired[i]; it interferes
    with receiver i when i is not among the codeword targets.
    """

    receivers: Tuple[int, ...]
    channels: np.ndarray
    codewords: Tuple[Tuple[int, ...], ...]
    desired: Tuple[Tuple[int, ...], ...]
    interfering: Tuple[Tuple[int, ...], ...]
    weights: np.ndarray
    power: float
    noise: float

    def __post_init__(self):
        channels = np.atleast_2d(np.asarray(self.channels, dtype=complex))
        weights = np.asarray(self.weights, dtype=float)
        if channels.shape[0] != len(self.receivers) or weights.shape[0] != len(self.receivers):
            raise ValueError("one channel row and one weight per receiver are required")
        if np.any(weights <= 0):
            raise ValueError("receiver weights must be positive")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "weights", weights)

    @property
    def antenna_count(self) -> int:
        return int(self.channels.shape[1])

    @property
    def codeword_count(self) -> int:
        return len(self.codewords)

    @property
    def normalized_channels(self) -> np.ndarray:
        """Channels scaled so that the power budget and the noise are both one."""
        return self.channels * np.sqrt(self.power / self.noise)

    def pairs(self) -> List[Tuple[int, int]]:
        """(receiver index, codeword index) of every desired message."""
        return [(i, j) for i, wanted in enumerate(self.desired) for j in wanted]

    @classmethod
    def from_design(
        cls,
        channels,
        common: int,
        weights: Sequence[float],
        power: float = 1.0,
        noise: float = 1.0,
    ) -> "BeamProblem":
        """Full multicast design: one codeword per (common + 1)-subset of the receivers."""
        channels = np.atleast_2d(np.asarray(channels, dtype=complex))
        users = tuple(range(channels.shape[0]))
        codewords = tuple(combinations(users, common + 1))
        desired = tuple(tuple(j for j, cw in enumerate(codewords) if k in cw) for k in users)
        interfering = tuple(tuple(j for j, cw in enumerate(codewords) if k not in cw) for k in users)
        return cls(receivers=users, channels=channels, codewords=codewords, desired=desired,
                   interfering=interfering, weights=np.asarray(weights, dtype=float),
                   power=power, noise=noise)


@dataclass(frozen=True, eq=False)
class BeamformerSolution:
    """
    Precoders of one transmission and the rates they support.

    ``rates`` are the rates actually used, proportional to the payloads
    (c_k times the common weighted rate); ``achievable_rates`` are the MAC
    rates the SINRs would allow.
    """

    receivers: Tuple[int, ...]
    precoders: np.ndarray
    sinr: np.ndarray
    rates: np.ndarray
    achievable_rates: np.ndarray
    common_rate: float
    method: str
    trace: Tuple[float, ...] = ()
    power_trace: Tuple[float, ...] = ()
    best_effort: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return max(len(self.trace) - 1, 0)

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.precoders) ** 2))

    def rate_of(self, user: int) -> float:
        return float(self.rates[self.receivers.index(user)])

    def to_dict(self):
        return {
            "method": self.method,
            "receivers": list(self.receivers),
            "common_rate": self.common_rate,
            "rates": [float(r) for r in self.rates],
            "achievable_rates": [float(r) for r in self.achievable_rates],
            "total_power": self.total_power,
            "iterations": self.iterations,
            "best_effort": self.best_effort,
            "trace": list(self.trace),
        }
