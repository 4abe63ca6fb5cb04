"""Cache placement: split state files into user-subset subfiles and assign them."""
import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..config import Config
from ..errors import DomainError
from ..models.allocation import MemoryAllocation
from ..models.placement import CacheLayout, Part, SubfileId

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]


def to_gain(value: Number) -> Fraction:
    """Exact caching gain: snapped to an integer when within tolerance, else a bounded rational."""
    if isinstance(value, Fraction):
        return value
    nearest = round(value)
    if abs(value - nearest) <= Config.GAIN_SNAP_TOL:
        return Fraction(int(nearest))
    return Fraction(value).limit_denominator(Config.GAIN_MAX_DENOMINATOR)


def split_parts(gain: Fraction) -> List[Tuple[Part, int, Fraction]]:
    """(part, integer gain, part size) pieces of one state file."""
    low = math.floor(gain)
    if gain == low:
        return [(Part.WHOLE, int(low), Fraction(1))]
    return [
        (Part.PART1, int(low), low + 1 - gain),
        (Part.PART2, int(low) + 1, gain - low),
    ]


def _state_inventory(state: int, gain: Fraction, user_count: int) -> Tuple[SubfileId, ...]:
    subfiles = []
    for part, integer_gain, part_size in split_parts(gain):
        size = part_size / math.comb(user_count, integer_gain)
        subfiles.extend(
            SubfileId(state=state, part=part, subset=subset, size=size)
            for subset in combinations(range(user_count), integer_gain)
        )
    return tuple(subfiles)


def place_gains(gains: Mapping[int, Number], user_count: int) -> CacheLayout:
    """
    Build the layout for the given per-state caching gains.

    Raises:
        DomainError: a gain lies outside [0, K] or K < 1.
    """
    if user_count < 1:
        raise DomainError("user_count must be at least 1")
    exact = {}
    inventory = {}
    for state, value in sorted(gains.items()):
        gain = to_gain(value)
        if gain < 0 or gain > user_count:
            raise DomainError(f"caching gain {float(gain)} of state {state} outside [0, {user_count}]")
        exact[int(state)] = gain
        inventory[int(state)] = _state_inventory(int(state), gain, user_count)
    logger.debug("Placed %d states for K=%d", len(inventory), user_count)
    return CacheLayout(user_count=user_count, gains=exact, inventory=inventory)


def place(
    allocation: MemoryAllocation,
    user_count: Optional[int] = None,
    states: Optional[Iterable[int]] = None,
) -> CacheLayout:
    """Place every state of an allocation, or only ``states`` when given."""
    user_count = allocation.user_count if user_count is None else user_count
    fractions = allocation.fractions
    wanted = range(len(fractions)) if states is None else sorted(set(int(s) for s in states))
    for s in wanted:
        if not 0 <= s < len(fractions):
            raise DomainError(f"unknown state index {s}")
    return place_gains({s: user_count * float(fractions[s]) for s in wanted}, user_count)


def place_sequence(gains: Sequence[Number], user_count: int) -> CacheLayout:
    return place_gains(dict(enumerate(gains)), user_count)


def _inventory(layout: CacheLayout, state: int) -> Tuple[SubfileId, ...]:
    try:
        return layout.inventory[state]
    except KeyError:
        raise DomainError(f"state {state} is not placed in this layout") from None


def _check_user(layout: CacheLayout, user: int) -> None:
    if not 0 <= user < layout.user_count:
        raise DomainError(f"unknown user {user}")


def cached_fraction(layout: CacheLayout, user: int, state: int) -> Fraction:
    _check_user(layout, user)
    return sum((sub.size for sub in _inventory(layout, state) if user in sub.subset), Fraction(0))


def missing_subfiles(layout: CacheLayout, user: int, state: int) -> Tuple[SubfileId, ...]:
    """Subfiles of ``state`` not stored by ``user``, in inventory order."""
    _check_user(layout, user)
    return tuple(sub for sub in _inventory(layout, state) if user not in sub.subset)
