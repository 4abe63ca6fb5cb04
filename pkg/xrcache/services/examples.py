"""Worked examples with known answers, checked end to end by ``reproduce-examples``."""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List

import numpy as np

from ..errors import XRCacheError
from ..models.allocation import AllocationProblem
from ..models.environment import RateMap
from ..models.plan import DeliveryMode
from .allocation import allocate, tradeoff_for
from .delivery import (
    build_multicast_plan,
    build_phantom_plan,
    chi_factor,
    common_gain,
    demands_for,
    seg_factor,
    verify_completeness,
)
from .metrics import approx_total_time
from .placement import place_sequence

logger = logging.getLogger(__name__)

TABLE_RATES = (3000.0, 2000.0, 1000.0, 2000.0, 3000.0)
TABLE_MEMORY = 2.25
TABLE_FRACTIONS = (0.25, 0.5, 0.75, 0.5, 0.25)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise AssertionError(message)


def _table_allocations():
    rate_map = RateMap(np.array(TABLE_RATES))
    for mode in ("multicast_aware", "local_first"):
        problem = AllocationProblem(rate_map=rate_map, total_memory=TABLE_MEMORY, user_count=4,
                                    tradeoff=tradeoff_for(mode, 2, 4))
        yield mode, rate_map, allocate(problem)


def check_table_allocation() -> str:
    for mode, _, allocation in _table_allocations():
        error = float(np.max(np.abs(allocation.fractions - np.array(TABLE_FRACTIONS))))
        _expect(error <= 1e-6, f"{mode}: m={allocation.fractions.round(6).tolist()} (error {error:.2e})")
    return "m = [0.25, 0.5, 0.75, 0.5, 0.25] for both trade-offs"


def check_approx_time() -> str:
    _, rate_map, allocation = next(_table_allocations())
    value = approx_total_time(allocation, rate_map, 4, 2)
    _expect(abs(value - 4.0 / 3.0 * 2.5e-4) <= 1e-9, f"approximate time {value:.6g}")
    return f"approximate time {value:.4e}"


def check_nested_plan() -> str:
    layout = place_sequence([1, 2, 2, 1], 4)
    demands = demands_for(layout, [0, 1, 2, 3])
    plan = build_multicast_plan(demands, layout, alpha=2)
    _expect(len(plan) == 4, f"{len(plan)} transmissions")
    _expect(all(len(t.codewords) == 3 for t in plan.transmissions), "codewords per transmission != 3")
    factors = tuple(seg_factor(int(d.gain), 1, 2, 4) for d in demands)
    chis = tuple(chi_factor(int(d.gain), 1, 4) for d in demands)
    _expect(factors == (2, 4, 4, 2), f"segmentation factors {factors}")
    _expect(chis == (1, 2, 2, 1), f"chi factors {chis}")
    expected = (Fraction(1, 8), Fraction(1, 12), Fraction(1, 12), Fraction(1, 8))
    for transmission in plan.transmissions:
        for cw in transmission.codewords:
            for k in cw.receivers:
                _expect(cw.payload(k) == expected[k], f"payload of user {k} is {cw.payload(k)}")
    verify_completeness(plan, demands, layout)
    return "4 transmissions x 3 codewords, payloads (1/8, 1/12, 1/12, 1/8)"


def check_phantom_plan() -> str:
    layout = place_sequence([3, 3, 3, 1], 4)
    demands = demands_for(layout, [0, 1, 2, 3])
    plan = build_phantom_plan(demands, layout, alpha=2, t_target=3)
    _expect(plan.phantom_users == frozenset({3}), f"phantom users {sorted(plan.phantom_users)}")
    multicast = [t for t in plan.transmissions if t.mode == DeliveryMode.PHANTOM_MULTICAST]
    unicast = [t for t in plan.transmissions if t.mode == DeliveryMode.UNICAST]
    _expect(len(multicast) == 1 and len(multicast[0].codewords) == 1, "expected one single-codeword multicast")
    _expect(multicast[0].codewords[0].receivers == (0, 1, 2), "multicast codeword must reach users 0, 1, 2")
    _expect(len(unicast) == 1 and unicast[0].payloads() == {3: Fraction(3, 4)}, "user 3 must get 3/4 by unicast")
    _expect(len(plan) == 2, f"{len(plan)} transmissions")
    verify_completeness(plan, demands, layout, strict=True)
    return "phantom user 3, one multicast codeword to {0,1,2}, unicast 3/4 to user 3"


def check_memory_sharing() -> str:
    layout = place_sequence([Fraction(6, 5), 2, 2, 1], 4)
    parts = sorted({sub.part.value for sub in layout.inventory[0]})
    _expect(parts == ["part1", "part2"], "state 0 must be split in two parts")
    part1 = sum((s.size for s in layout.inventory[0] if s.part.value == "part1"), Fraction(0))
    part2 = sum((s.size for s in layout.inventory[0] if s.part.value == "part2"), Fraction(0))
    _expect((part1, part2) == (Fraction(4, 5), Fraction(1, 5)), f"part sizes {part1}, {part2}")
    demands = demands_for(layout, [0, 1, 2, 3])
    plan = build_multicast_plan(demands, layout, alpha=2)
    first = plan.transmissions[0]
    _expect(first.serving == (0, 1, 2), f"first serving set {first.serving}")
    labels = sorted(seg.label() for seg in first.codewords[0].data[0])
    expected = sorted(["W0[1]/part1#1/2", "W0[1,2]/part2#1/4", "W0[1,3]/part2#1/4"])
    _expect(labels == expected, f"user 0 data in the first codeword: {labels}")
    report = verify_completeness(plan, demands, layout)
    _expect(report.delivered[0] == Fraction(7, 10), f"user 0 received {report.delivered[0]}")
    return "parts (0.8, 0.2), three part-specific segments, user 0 receives 0.7"


def check_completeness(max_users: int = 4) -> str:
    plans = 0
    for user_count in range(2, max_users + 1):
        for alpha in (1, 2):
            for gains in itertools.combinations_with_replacement(range(user_count + 1), user_count):
                if min(gains) + alpha > user_count:
                    continue
                layout = place_sequence(list(gains), user_count)
                demands = demands_for(layout, list(range(user_count)))
                common = common_gain(demands)
                _expect(common == min(gains), "common gain mismatch")
                plan = build_multicast_plan(demands, layout, alpha)
                report = verify_completeness(plan, demands, layout)
                _expect(report.delivered == report.required, f"gains {gains} alpha {alpha} under-deliver")
                plans += 1
    return f"{plans} plans delivered exactly"


CHECKS: List[tuple] = [
    ("table-allocation", check_table_allocation),
    ("approximate-time", check_approx_time),
    ("nested-multicast", check_nested_plan),
    ("phantom-users", check_phantom_plan),
    ("memory-sharing", check_memory_sharing),
    ("completeness", check_completeness),
]


def run_check(name: str, check: Callable[[], str]) -> CheckResult:
    try:
        detail = check()
    except (AssertionError, XRCacheError) as err:
        logger.warning("Check %s failed: %s", name, err)
        return CheckResult(name, False, str(err))
    return CheckResult(name, True, detail)


def reproduce_examples() -> List[CheckResult]:
    return [run_check(name, check) for name, check in CHECKS]
