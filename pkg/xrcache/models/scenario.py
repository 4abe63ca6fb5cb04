from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import Config
from .allocation import TradeoffMode
from .beams import BeamformingOptions
from .environment import EnvironmentConfig


@dataclass(frozen=True)
class SchemeSpec:
    """Allocation trade-off and delivery path of one benchmark scheme."""

    name: str
    tradeoff: TradeoffMode
    delivery: Literal["multicast", "phantom", "unicast"]

    def to_dict(self):
        return {"name": self.name, "tradeoff": self.tradeoff.value, "delivery": self.delivery}


SCHEMES: Dict[str, SchemeSpec] = {
    spec.name: spec
    for spec in (
        SchemeSpec("proposed_local_first_unicast", TradeoffMode.LOCAL_FIRST, "unicast"),
        SchemeSpec("proposed_local_first", TradeoffMode.LOCAL_FIRST, "phantom"),
        SchemeSpec("proposed_multicast_aware", TradeoffMode.MULTICAST_AWARE, "phantom"),
        SchemeSpec("ms_uniform", TradeoffMode.UNIFORM, "multicast"),
        SchemeSpec("uniform_unicast", TradeoffMode.UNIFORM, "unicast"),
        SchemeSpec("proposed_multicast_aware_unicast", TradeoffMode.MULTICAST_AWARE, "unicast"),
        SchemeSpec("proposed_local_first_no_phantom", TradeoffMode.LOCAL_FIRST, "multicast"),
        SchemeSpec("proposed_multicast_aware_no_phantom", TradeoffMode.MULTICAST_AWARE, "multicast"),
    )
}

MAIN_SCHEMES = ("proposed_local_first_unicast", "proposed_local_first", "proposed_multicast_aware", "ms_uniform")

SweepParameter = Literal[
    "sigma", "border_snr", "alpha", "memory_ratio", "user_count", "attenuated_states", "attenuation_db"
]


class AllocationSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    user_count: int = Field(4, ge=1)
    memory_ratio: float = Field(0.33, gt=0)
    total_memory: Optional[float] = Field(None, gt=0)
    tradeoff: Literal["multicast_aware", "local_first"] = "multicast_aware"
    local_first_factor: float = Field(default_factory=lambda: Config.LOCAL_FIRST_FACTOR, gt=0)
    method: Literal["structural", "charnes_cooper"] = "structural"
    rates: Optional[List[float]] = None
    rate_map_csv: Optional[str] = None

    @model_validator(mode="after")
    def _one_rate_source(self) -> "AllocationSettings":
        if self.rates is not None and self.rate_map_csv is not None:
            raise ValueError("give either rates or rate_map_csv, not both")
        if self.rates is not None and any(r <= 0 for r in self.rates):
            raise ValueError("rates must be positive")
        return self


class DeliverySettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: Literal["multicast", "phantom", "unicast"] = "phantom"
    t_target: Optional[int] = Field(None, ge=0)
    user_states: Optional[List[int]] = None


class ExperimentSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    schemes: List[str] = Field(default_factory=lambda: list(MAIN_SCHEMES))
    drops: int = Field(200, ge=1)
    master_seed: int = 0
    bootstrap_resamples: int = Field(1000, ge=1)

    @field_validator("schemes")
    @classmethod
    def _known_schemes(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in SCHEMES]
        if unknown:
            raise ValueError(f"unknown schemes {unknown}; choose from {sorted(SCHEMES)}")
        if not value:
            raise ValueError("at least one scheme is required")
        return value


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    parameter: SweepParameter
    values: List[float] = Field(min_length=1)
    drops: Optional[int] = Field(None, ge=1)


class Scenario(BaseModel):
    """Everything one run needs; mirrors the sections of a scenario file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    environment: EnvironmentConfig = Field(default_factory=EnvironmentConfig)
    allocation: AllocationSettings = Field(default_factory=AllocationSettings)
    delivery: DeliverySettings = Field(default_factory=DeliverySettings)
    beamforming: BeamformingOptions = Field(default_factory=BeamformingOptions)
    experiment: ExperimentSettings = Field(default_factory=ExperimentSettings)
    sweep: Optional[SweepSpec] = None

    @property
    def user_count(self) -> int:
        return self.allocation.user_count

    @property
    def alpha(self) -> int:
        return self.environment.spatial_multiplexing_gain

    @property
    def state_count(self) -> int:
        if self.allocation.rates is not None:
            return len(self.allocation.rates)
        return self.environment.state_count

    @property
    def total_memory(self) -> float:
        if self.allocation.total_memory is not None:
            return self.allocation.total_memory
        return self.allocation.memory_ratio * self.state_count

    @property
    def t_target(self) -> int:
        """Phantom threshold; defaults to round(K M / S)."""
        if self.delivery.t_target is not None:
            return self.delivery.t_target
        return int(round(self.user_count * self.total_memory / self.state_count))

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()[:16]

    def updated(self, section: str, **values) -> "Scenario":
        """Copy with fields of one section replaced, validated again."""
        data = self.model_dump()
        data[section] = {**(data.get(section) or {}), **values}
        return Scenario.model_validate(data)

    def with_value(self, parameter: str, value: float) -> "Scenario":
        """Copy with one sweep parameter set."""
        if parameter == "sigma":
            return self.updated("environment", shadowing_std_db=float(value))
        if parameter == "border_snr":
            return self.updated("environment", border_snr_db=float(value))
        if parameter == "alpha":
            return self.updated("environment", spatial_multiplexing_gain=int(value))
        if parameter == "memory_ratio":
            return self.updated("allocation", memory_ratio=float(value), total_memory=None)
        if parameter == "user_count":
            return self.updated("allocation", user_count=int(value))
        if parameter == "attenuated_states":
            return self.updated("environment", shadowing_model="attenuated", attenuated_states=int(value))
        if parameter == "attenuation_db":
            return self.updated("environment", shadowing_model="attenuated", attenuation_db=float(value))
        raise ValueError(f"unknown sweep parameter {parameter!r}")

    @classmethod
    def desk(cls, **sections) -> "Scenario":
        """S=100, K=4, L=4, alpha=2, sigma=8 dB, M/S=0.33, 200 drops."""
        values = {
            "environment": EnvironmentConfig.desk().model_dump(),
            "allocation": {"user_count": 4, "memory_ratio": 0.33},
            "beamforming": {"max_iters": 10, "inner_tol": 1e-3},
            "experiment": {"drops": 200},
        }
        for name, section in sections.items():
            values[name] = {**values.get(name, {}), **section}
        return cls.model_validate(values)

    @classmethod
    def full(cls, **sections) -> "Scenario":
        """S=900, K=6, L=32, 500 drops."""
        values = {
            "environment": EnvironmentConfig.full().model_dump(),
            "allocation": {"user_count": 6, "memory_ratio": 0.33},
            "experiment": {"drops": 500},
        }
        for name, section in sections.items():
            values[name] = {**values.get(name, {}), **section}
        return cls.model_validate(values)


PRESETS = {"desk": Scenario.desk, "full": Scenario.full}
