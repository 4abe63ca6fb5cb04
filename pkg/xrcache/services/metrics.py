"""Delivery-time accounting over plans and beamformer solutions."""
import logging
import math
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError, UnboundedTimeError
from ..models.allocation import MemoryAllocation
from ..models.beams import BeamformerSolution
from ..models.environment import RateMap
from ..models.plan import TransmissionPlan
from ..models.reports import ApproxReport, DeliveryReport

logger = logging.getLogger(__name__)

# rates at or below this are treated as zero
ZERO_RATE_TOL = 1e-12


def transmission_time(payloads: Sequence, rates: Sequence, strict: bool = False) -> float:
    """
    max c_k / R_k over users with a positive payload.

    A positive payload with a zero rate gives +inf, or raises in strict mode.

    Raises:
        UnboundedTimeError: strict mode and some served user has no rate.
    """
    if len(payloads) != len(rates):
        raise DomainError(f"{len(payloads)} payloads for {len(rates)} rates")
    worst = 0.0
    for user, (payload, rate) in enumerate(zip(payloads, rates)):
        if payload <= 0:
            continue
        if rate <= ZERO_RATE_TOL:
            if strict:
                raise UnboundedTimeError(user, float(payload))
            return math.inf
        worst = max(worst, float(payload) / float(rate))
    return worst


def total_time(
    plan: TransmissionPlan,
    solutions: Sequence[Optional[BeamformerSolution]],
    scheme: str = "",
    seed: Optional[int] = None,
    rate_scale: float = 1.0,
    strict: bool = False,
    context: Optional[Mapping[str, float]] = None,
) -> DeliveryReport:
    """
    Sum the transmission times of a plan.

    ``solutions[i]`` holds the rates of transmission i; a transmission without
    receivers takes no time and may carry None.
    """
    if len(solutions) != len(plan):
        raise DomainError(f"{len(solutions)} solutions for a plan of {len(plan)} transmissions")
    served = [Fraction(0)] * plan.user_count
    times = []
    for transmission, solution in zip(plan.transmissions, solutions):
        payloads = transmission.payloads()
        receivers = sorted(payloads)
        if not receivers:
            times.append(0.0)
            continue
        if solution is None:
            raise DomainError("a transmission with receivers has no beamformer solution")
        rates = [rate_scale * solution.rate_of(k) for k in receivers]
        times.append(transmission_time([payloads[k] for k in receivers], rates, strict=strict))
        for cw in transmission.codewords:
            for k in cw.receivers:
                served[k] += cw.payload(k)

    total = sum(times, 0.0)
    censored = math.isinf(total)
    if censored:
        logger.warning("Censored drop (scheme=%s, seed=%s): a served user has zero rate", scheme, seed)
    return DeliveryReport(
        scheme=scheme,
        seed=seed,
        user_count=plan.user_count,
        transmission_times=tuple(times),
        total_time=total,
        served=tuple(served),
        censored=censored,
        context=dict(context or {}),
    )


def closed_form_total_time(
    missing: Sequence,
    rates: Mapping[Tuple[int, ...], Mapping[int, float]],
    common: int,
    alpha: int,
) -> float:
    """
    Total time of a full multicast plan from per-user missing data and rates.

    ``rates[serving][k]`` is the message rate of user k in the transmission to
    ``serving``; every serving set of size common + alpha must be present.
    """
    user_count = len(missing)
    norm = math.comb(user_count - 1, common + alpha - 1) * math.comb(common + alpha - 1, common)
    total = 0.0
    for serving, per_user in rates.items():
        if len(serving) != common + alpha:
            raise DomainError(f"serving set {serving} does not have {common + alpha} users")
        total += max(float(missing[k]) / per_user[k] for k in serving)
    return total / norm


def approx_total_time(allocation: MemoryAllocation, rate_map: RateMap, user_count: int, alpha: int) -> float:
    """K / (t_bar + alpha) * max_s (1 - m(s)) / r(s)."""
    if allocation.state_count != len(rate_map):
        raise DomainError("allocation and rate map cover different states")
    worst = float(np.max((1.0 - allocation.fractions) / rate_map.rates))
    return user_count / (user_count * allocation.m_bar + alpha) * worst


def rate_ratio(weighted_rate: float, uniform_rate: float, common: float, uniform_gain: float, alpha: int) -> float:
    return (common + alpha) * weighted_rate / ((uniform_gain + alpha) * uniform_rate)


def approx_report(
    allocation: MemoryAllocation,
    rate_map: RateMap,
    alpha: int,
    total_memory: float,
    weighted_rate: float,
    uniform_rate: float,
    common: Optional[float] = None,
) -> ApproxReport:
    """
    Approximate time and symmetric rates of the weighted scheme against uniform caching.

    ``common`` defaults to t_bar; the uniform gain is K M / S.
    """
    user_count = allocation.user_count
    common = allocation.t_bar if common is None else common
    uniform_gain = user_count * total_memory / len(rate_map)
    return ApproxReport(
        approx_time=approx_total_time(allocation, rate_map, user_count, alpha),
        weighted_rate=weighted_rate,
        uniform_rate=uniform_rate,
        weighted_symmetric_rate=(common + alpha) * weighted_rate,
        uniform_symmetric_rate=(uniform_gain + alpha) * uniform_rate,
        ratio=rate_ratio(weighted_rate, uniform_rate, common, uniform_gain, alpha),
    )
