from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class DeliveryReport:
    """Delivery times of one drop under one scheme."""

    scheme: str
    seed: Optional[int]
    user_count: int
    transmission_times: Tuple[float, ...]
    total_time: float
    served: Tuple[Fraction, ...]
    censored: bool = False
    context: Dict[str, float] = field(default_factory=dict)

    @property
    def transmission_count(self) -> int:
        return len(self.transmission_times)

    @property
    def effective_rates(self) -> Tuple[float, ...]:
        if self.censored or self.total_time <= 0:
            return tuple(0.0 for _ in self.served)
        return tuple(float(size) / self.total_time for size in self.served)

    @property
    def symmetric_rate(self) -> float:
        """K / T_T; zero when the drop is censored or nothing was sent."""
        if self.censored or not self.total_time > 0 or math.isinf(self.total_time):
            return 0.0
        return self.user_count / self.total_time

    def to_row(self) -> dict:
        row = {"scheme": self.scheme, "seed": self.seed}
        row.update(self.context)
        row.update({
            "K": self.user_count,
            "T_T": self.total_time,
            "symmetric_rate": self.symmetric_rate,
            "transmissions": self.transmission_count,
            "censored": int(self.censored),
        })
        return row

    def to_dict(self):
        return {
            "scheme": self.scheme,
            "seed": self.seed,
            "user_count": self.user_count,
            "transmission_times": list(self.transmission_times),
            "total_time": self.total_time,
            "served": [str(x) for x in self.served],
            "effective_rates": list(self.effective_rates),
            "symmetric_rate": self.symmetric_rate,
            "censored": self.censored,
        }


@dataclass(frozen=True)
class ApproxReport:
    """Approximate delivery time and the symmetric-rate comparison against uniform caching."""

    approx_time: float
    weighted_rate: float
    uniform_rate: float
    weighted_symmetric_rate: float
    uniform_symmetric_rate: float
    ratio: float

    def to_dict(self):
        return {
            "T_hat": self.approx_time,
            "R_w": self.weighted_rate,
            "R_u": self.uniform_rate,
            "R_w_s": self.weighted_symmetric_rate,
            "R_u_s": self.uniform_symmetric_rate,
            "ratio": self.ratio,
        }


@dataclass(frozen=True, eq=False)
class SchemeSummary:
    """Statistics of one scheme at one sweep point; censored drops count as +inf."""

    scheme: str
    samples: np.ndarray
    censored: int

    @property
    def drops(self) -> int:
        return int(self.samples.shape[0])

    @property
    def finite(self) -> np.ndarray:
        return self.samples[np.isfinite(self.samples)]

    @property
    def mean(self) -> float:
        finite = self.finite
        return float(np.mean(finite)) if finite.size else math.inf

    def percentile(self, q: float) -> float:
        # method="higher" keeps +inf samples from producing nan by interpolation
        return float(np.percentile(self.samples, q, method="higher"))

    @property
    def p95(self) -> float:
        return self.percentile(95)

    @property
    def iqr(self) -> float:
        upper, lower = self.percentile(75), self.percentile(25)
        if math.isinf(upper):
            return math.inf
        return upper - lower

    def cdf(self) -> Tuple[np.ndarray, np.ndarray]:
        ordered = np.sort(self.samples)
        return ordered, np.arange(1, ordered.size + 1) / ordered.size

    def to_row(self) -> dict:
        return {
            "scheme": self.scheme,
            "drops": self.drops,
            "mean_T_T": self.mean,
            "p95_T_T": self.p95,
            "iqr_T_T": self.iqr,
            "censored": self.censored,
        }


@dataclass(frozen=True, eq=False)
class AggregateResult:
    """Per-scheme summaries at every sweep point, plus the per-drop reports they came from."""

    parameter: Optional[str]
    points: Tuple[Optional[float], ...]
    summaries: Dict[Optional[float], Dict[str, SchemeSummary]]
    reports: Tuple[DeliveryReport, ...] = ()

    @property
    def schemes(self) -> Tuple[str, ...]:
        names = []
        for point in self.points:
            for name in self.summaries[point]:
                if name not in names:
                    names.append(name)
        return tuple(names)

    def summary(self, scheme: str, point: Optional[float] = None) -> SchemeSummary:
        point = self.points[0] if point is None else point
        return self.summaries[point][scheme]

    def rows(self):
        for point in self.points:
            for summary in self.summaries[point].values():
                row = {"parameter": self.parameter or "", "value": "" if point is None else point}
                row.update(summary.to_row())
                yield row

    def cdf_rows(self):
        for point in self.points:
            for summary in self.summaries[point].values():
                values, probabilities = summary.cdf()
                for value, probability in zip(values, probabilities):
                    yield {"parameter": self.parameter or "", "value": "" if point is None else point,
                           "scheme": summary.scheme, "T_T": float(value), "cdf": float(probability)}
