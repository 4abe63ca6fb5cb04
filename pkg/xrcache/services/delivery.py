"""
Delivery scheduling.

Every transmission serves a set of (common gain + alpha) users. Inside it one
nested codeword is formed per subset U of (common gain + 1) users; the data
term of user k in U is built from the chunks of k's missing subfiles that are
cached by all of U minus k, so every other member of U can cancel it.
Chunks are taken from a per-(user, subfile) cursor, never twice.
"""
import hashlib
import json
import logging
import math
from collections import defaultdict
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..errors import DomainError, PlanInvariantError, ScheduleError
from ..models.placement import CacheLayout, SubfileId
from ..models.plan import (
    Codeword,
    CompletenessReport,
    DeliveryMode,
    SegmentId,
    Transmission,
    TransmissionPlan,
    UserDemand,
)
from .placement import missing_subfiles, split_parts

logger = logging.getLogger(__name__)


# ============================================================================
# Demands and factors
# ============================================================================

def demands_for(layout: CacheLayout, user_states: Sequence[int]) -> Tuple[UserDemand, ...]:
    """One demand per user; user k requests the file of state user_states[k]."""
    if len(user_states) != layout.user_count:
        raise DomainError(f"{len(user_states)} user states given for {layout.user_count} users")
    demands = []
    for k, state in enumerate(user_states):
        if state not in layout.gains:
            raise DomainError(f"state {state} of user {k} is not placed in the layout")
        gain = layout.gains[state]
        demands.append(UserDemand(user=k, state=int(state), gain=gain,
                                  missing=1 - gain / layout.user_count))
    return tuple(demands)


def common_gain(demands: Iterable[UserDemand]) -> int:
    floors = [math.floor(d.gain) for d in demands]
    if not floors:
        raise DomainError("common gain of an empty demand set")
    return int(min(floors))


def effective_alpha(alpha: int, user_count: int, gain: int) -> int:
    """Spatial gain actually usable when (gain + alpha) would exceed the user count."""
    return max(0, min(alpha, user_count - gain))


def seg_factor(part_gain: int, common: int, alpha: int, user_count: int) -> int:
    return math.comb(part_gain, common) * math.comb(user_count - common - 1, alpha - 1)


def chi_factor(part_gain: int, common: int, user_count: int) -> int:
    return math.comb(user_count - common - 1, part_gain - common)


def payload_closed_form(missing: Fraction, common: int, alpha: int, user_count: int) -> Fraction:
    """Per-codeword payload c_k of an integer-gain user in a full multicast plan."""
    return missing / (math.comb(user_count - 1, common + alpha - 1) * math.comb(common + alpha - 1, common))


def _parts_of(demand: UserDemand, layout: CacheLayout, common: int, alpha: int):
    """(seg_factor, missing subfiles) for each memory-sharing part of a user's file."""
    missing = missing_subfiles(layout, demand.user, demand.state)
    parts = []
    for part, part_gain, _ in split_parts(demand.gain):
        subfiles = [sub for sub in missing if sub.part == part]
        if subfiles:
            parts.append((seg_factor(part_gain, common, alpha, layout.user_count), subfiles))
    return parts


def _check_demands(demands: Sequence[UserDemand], layout: CacheLayout) -> Dict[int, UserDemand]:
    by_user = {d.user: d for d in demands}
    for d in demands:
        if not 0 <= d.user < layout.user_count:
            raise DomainError(f"unknown user {d.user}")
        if layout.gains.get(d.state) != d.gain:
            raise DomainError(f"demand of user {d.user} disagrees with the layout gain of state {d.state}")
    return by_user


# ============================================================================
# Nested codeword construction
# ============================================================================

def _nested_transmissions(
    demands: Sequence[UserDemand],
    layout: CacheLayout,
    alpha: int,
    common: int,
    mode: DeliveryMode,
    phantoms: frozenset = frozenset(),
) -> Tuple[Transmission, ...]:
    user_count = layout.user_count
    parts = {
        d.user: _parts_of(d, layout, common, alpha)
        for d in demands
        if d.user not in phantoms and d.missing > 0
    }
    cursor: Dict[Tuple[int, SubfileId], int] = defaultdict(int)
    transmissions = []
    for serving in combinations(range(user_count), common + alpha):
        if phantoms and len(set(serving) - phantoms) < alpha:
            continue
        codewords = []
        for targets in combinations(serving, common + 1):
            data = {}
            for k in targets:
                if k not in parts:
                    continue
                others = set(targets) - {k}
                segments = []
                for factor, subfiles in parts[k]:
                    for sub in subfiles:
                        if not others.issubset(sub.subset):
                            continue
                        q = cursor[(k, sub)]
                        if q >= factor:
                            raise PlanInvariantError(f"subfile {sub.label()} of user {k} has no chunk left")
                        cursor[(k, sub)] = q + 1
                        segments.append(SegmentId(parent=sub, index=q, count=factor))
                if segments:
                    data[k] = tuple(segments)
            # phantom users are never targets
            codewords.append(Codeword(targets=tuple(k for k in targets if k not in phantoms), data=data))
        transmissions.append(Transmission(serving=serving, codewords=tuple(codewords), mode=mode))
    return tuple(transmissions)


def build_multicast_plan(
    demands: Sequence[UserDemand],
    layout: CacheLayout,
    alpha: int,
    common: Optional[int] = None,
) -> TransmissionPlan:
    """
    Nested-codeword multicast over every serving set of size common + alpha.

    Raises:
        ScheduleError: common + alpha exceeds the user count.
    """
    _check_demands(demands, layout)
    floor_gain = common_gain(demands)
    common = floor_gain if common is None else common
    if common > floor_gain:
        raise DomainError(f"common gain {common} exceeds the smallest user gain {floor_gain}")
    if alpha < 1 or common + alpha > layout.user_count:
        raise ScheduleError(common, alpha, layout.user_count)
    transmissions = _nested_transmissions(demands, layout, alpha, common, DeliveryMode.MULTICAST)
    logger.debug("Multicast plan: t=%d alpha=%d, %d transmissions", common, alpha, len(transmissions))
    return TransmissionPlan(user_count=layout.user_count, alpha=alpha, common_gain=common,
                            transmissions=transmissions)


def build_unicast_plan(
    demands: Sequence[UserDemand],
    layout: CacheLayout,
    alpha: int,
    mode: DeliveryMode = DeliveryMode.UNICAST,
) -> TransmissionPlan:
    """Batches of up to alpha users, each getting its whole missing content in its own codeword."""
    if alpha < 1:
        raise DomainError("alpha must be at least 1")
    _check_demands(demands, layout)
    pending = [d for d in sorted(demands, key=lambda d: d.user) if d.missing > 0]
    transmissions = []
    for start in range(0, len(pending), alpha):
        batch = pending[start:start + alpha]
        codewords = tuple(
            Codeword(
                targets=(d.user,),
                data={d.user: tuple(SegmentId(sub, 0, 1) for sub in missing_subfiles(layout, d.user, d.state))},
            )
            for d in batch
        )
        transmissions.append(Transmission(serving=tuple(d.user for d in batch), codewords=codewords, mode=mode))
    return TransmissionPlan(user_count=layout.user_count, alpha=alpha, common_gain=0,
                            transmissions=tuple(transmissions))


def build_phantom_plan(
    demands: Sequence[UserDemand],
    layout: CacheLayout,
    alpha: int,
    t_target: int,
) -> TransmissionPlan:
    """
    Multicast with the weakest-gain users replaced by phantom users.

    When the common gain is below ``t_target`` the users holding it are
    excluded, the design is built for the next gain level, and the excluded
    users are unicast. Anything the skipped serving sets leave undelivered is
    topped up by unicast, so the returned plan is always complete.
    """
    _check_demands(demands, layout)
    user_count = layout.user_count
    floors = {d.user: int(math.floor(d.gain)) for d in demands}
    base = min(floors.values())

    phantoms = frozenset()
    common = base
    if base < t_target:
        weakest = frozenset(k for k, f in floors.items() if f == base)
        remaining = [k for k in floors if k not in weakest]
        if remaining and len(remaining) >= base + alpha:
            phantoms = weakest
            common = min(floors[k] for k in remaining)

    usable = effective_alpha(alpha, user_count, common)
    if not phantoms:
        logger.debug("Phantom guard not met (t=%d, target=%d); plain multicast", base, t_target)
        if usable == 0:
            return TransmissionPlan(user_count=user_count, alpha=alpha, common_gain=common)
        return build_multicast_plan(demands, layout, usable, common)

    multicast = TransmissionPlan(
        user_count=user_count,
        alpha=usable,
        common_gain=common,
        transmissions=_nested_transmissions(
            demands, layout, usable, common, DeliveryMode.PHANTOM_MULTICAST, phantoms
        ) if usable else (),
        phantom_users=phantoms,
    )
    unicast = build_unicast_plan([d for d in demands if d.user in phantoms], layout, alpha)
    plan = multicast + unicast
    report = verify_completeness(plan, demands, layout, strict=False)
    if not report.complete:
        logger.debug("Phantom plan left residuals for users %s", sorted(k for k, v in report.residuals.items() if v))
        plan = plan + topup_unicast(report.residuals, alpha, user_count)
    logger.debug("Phantom plan: phantoms=%s t=%d, %d transmissions", sorted(phantoms), common, len(plan))
    return plan


# ============================================================================
# Verification and top-up
# ============================================================================

def _uncovered(parent: SubfileId, intervals: List[Tuple[Fraction, Fraction, int]]) -> List[SegmentId]:
    if not intervals:
        return [SegmentId(parent, 0, 1)]
    grid = math.lcm(*(count for _, _, count in intervals))
    covered = set()
    for start, stop, _ in intervals:
        covered.update(range(int(start * grid), int(stop * grid)))
    return [SegmentId(parent, i, grid) for i in range(grid) if i not in covered]


def verify_completeness(
    plan: TransmissionPlan,
    demands: Sequence[UserDemand],
    layout: CacheLayout,
    strict: Optional[bool] = None,
) -> CompletenessReport:
    """
    Account the data every user receives.

    ``strict`` defaults to True for plans without phantom multicast; then any
    shortfall raises.

    Raises:
        PlanInvariantError: a segment reaches the same user twice (or overlaps
            another one), is cached by its receiver, belongs to another state,
            or a strict plan under-delivers.
    """
    by_user = _check_demands(demands, layout)
    if strict is None:
        strict = DeliveryMode.PHANTOM_MULTICAST not in plan.modes

    received: Dict[int, Dict[SubfileId, List[Tuple[Fraction, Fraction, int]]]] = defaultdict(lambda: defaultdict(list))
    for k, seg in plan.segments():
        demand = by_user.get(k)
        if demand is None:
            raise PlanInvariantError(f"segment {seg.label()} sent to user {k} without a demand")
        if seg.parent.state != demand.state or k in seg.parent.subset:
            raise PlanInvariantError(f"segment {seg.label()} is not missing at user {k}")
        start, stop = seg.interval
        received[k][seg.parent].append((start, stop, seg.count))

    delivered, required, residuals = [], [], {}
    for k in range(layout.user_count):
        demand = by_user.get(k)
        if demand is None:
            delivered.append(Fraction(0))
            required.append(Fraction(0))
            continue
        total = Fraction(0)
        leftover = []
        for sub in missing_subfiles(layout, k, demand.state):
            intervals = sorted(received[k].get(sub, []))
            for (_, prev_stop, _), (start, _, _) in zip(intervals, intervals[1:]):
                if start < prev_stop:
                    raise PlanInvariantError(f"user {k} receives part of {sub.label()} twice")
            covered = sum((stop - start for start, stop, _ in intervals), Fraction(0))
            total += covered * sub.size
            if covered < 1:
                leftover.extend(_uncovered(sub, intervals))
        delivered.append(total)
        required.append(demand.missing)
        residuals[k] = tuple(leftover)

    report = CompletenessReport(delivered=tuple(delivered), required=tuple(required), residuals=residuals)
    if strict and (not report.complete or report.delivered != report.required):
        short = [k for k in range(layout.user_count) if delivered[k] != required[k]]
        raise PlanInvariantError(f"plan under-delivers to users {short}")
    return report


def topup_unicast(
    residuals: Mapping[int, Sequence[SegmentId]],
    alpha: int,
    user_count: Optional[int] = None,
) -> TransmissionPlan:
    """Unicast the residual segments of up to alpha users per transmission."""
    pending = sorted(k for k, segments in residuals.items() if segments)
    if user_count is None:
        user_count = max(residuals, default=-1) + 1
    transmissions = []
    for start in range(0, len(pending), alpha):
        batch = pending[start:start + alpha]
        codewords = tuple(Codeword(targets=(k,), data={k: tuple(residuals[k])}) for k in batch)
        transmissions.append(Transmission(serving=tuple(batch), codewords=codewords,
                                          mode=DeliveryMode.TOPUP_UNICAST))
    return TransmissionPlan(user_count=user_count, alpha=alpha, common_gain=0,
                            transmissions=tuple(transmissions))


# ============================================================================
# Dispatch
# ============================================================================

def deliver(
    demands: Sequence[UserDemand],
    layout: CacheLayout,
    alpha: int,
    mode: str = "multicast",
    t_target: Optional[int] = None,
) -> TransmissionPlan:
    """Complete plan for one of the delivery modes: multicast, phantom or unicast."""
    if mode == "unicast":
        plan = build_unicast_plan(demands, layout, alpha)
    elif mode == "phantom":
        plan = build_phantom_plan(demands, layout, alpha, common_gain(demands) if t_target is None else t_target)
    elif mode == "multicast":
        common = common_gain(demands)
        usable = effective_alpha(alpha, layout.user_count, common)
        if usable == 0:
            plan = TransmissionPlan(user_count=layout.user_count, alpha=alpha, common_gain=common)
        else:
            plan = build_multicast_plan(demands, layout, usable, common)
    else:
        raise DomainError(f"unknown delivery mode {mode!r}")
    report = verify_completeness(plan, demands, layout, strict=False)
    if not report.complete:
        plan = plan + topup_unicast(report.residuals, alpha, layout.user_count)
    return plan


def plan_hash(plan: TransmissionPlan) -> str:
    body = json.dumps(plan.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode("utf-8")).hexdigest()
