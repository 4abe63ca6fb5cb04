from fractions import Fraction

import numpy as np
import pytest

from xrcache.errors import DomainError
from xrcache.models.allocation import MemoryAllocation
from xrcache.models.placement import Part
from xrcache.services.placement import (
    cached_fraction,
    missing_subfiles,
    place,
    place_gains,
    place_sequence,
    split_parts,
    to_gain,
)


def test_integer_gain_splits_over_all_subsets():
    layout = place_sequence([2], 4)
    subfiles = layout.inventory[0]
    assert len(subfiles) == 6
    assert all(sub.size == Fraction(1, 6) and sub.part == Part.WHOLE for sub in subfiles)
    assert cached_fraction(layout, 0, 0) == Fraction(1, 2)
    assert len(missing_subfiles(layout, 0, 0)) == 3


def test_fractional_gain_shares_memory_between_two_levels():
    layout = place_sequence([Fraction(6, 5)], 4)
    assert split_parts(Fraction(6, 5)) == [(Part.PART1, 1, Fraction(4, 5)), (Part.PART2, 2, Fraction(1, 5))]
    sizes = {sub.part: sub.size for sub in layout.inventory[0]}
    assert sizes == {Part.PART1: Fraction(1, 5), Part.PART2: Fraction(1, 30)}
    for k in range(4):
        assert cached_fraction(layout, k, 0) == Fraction(3, 10)


@pytest.mark.parametrize("gain", [0, Fraction(1, 3), 1, Fraction(5, 2), 4])
def test_whole_file_is_covered_once(gain):
    layout = place_sequence([gain], 4)
    assert sum((sub.size for sub in layout.inventory[0]), Fraction(0)) == 1
    for k in range(4):
        assert cached_fraction(layout, k, 0) == Fraction(gain) / 4


def test_user_memory_sums_over_states():
    layout = place_sequence([1, 2, Fraction(1, 2)], 4)
    expected = Fraction(1, 4) + Fraction(1, 2) + Fraction(1, 8)
    assert all(layout.used_memory(k) == expected for k in range(4))


def test_gains_snap_to_integers():
    assert to_gain(1.9999999999) == 2
    assert to_gain(0.5) == Fraction(1, 2)
    assert to_gain(Fraction(7, 3)) == Fraction(7, 3)


def test_gain_outside_range():
    with pytest.raises(DomainError):
        place_gains({0: 5}, 4)
    with pytest.raises(DomainError):
        place_gains({0: -0.5}, 4)


def test_place_only_requested_states():
    allocation = MemoryAllocation(fractions=np.array([0.25, 0.5, 0.75]), user_count=4, tradeoff=0.5, gamma=1.0)
    layout = place(allocation, states=[2, 0, 2])
    assert layout.states == (0, 2)
    assert layout.gains == {0: 1, 2: 3}


def test_unplaced_state_is_rejected():
    layout = place_sequence([1], 2)
    with pytest.raises(DomainError):
        missing_subfiles(layout, 0, 3)
    with pytest.raises(DomainError):
        cached_fraction(layout, 2, 0)


@pytest.mark.parametrize("seed", range(30))
def test_random_layouts_split_every_file_exactly(seed):
    rng = np.random.default_rng(seed)
    user_count = int(rng.integers(1, 7))
    denominator = int(rng.choice([1, 2, 3, 5, 7]))
    gains = [Fraction(int(rng.integers(0, user_count * denominator + 1)), denominator) for _ in range(4)]
    layout = place_sequence(gains, user_count)
    for state, gain in enumerate(gains):
        assert sum((sub.size for sub in layout.inventory[state]), Fraction(0)) == 1
        for k in range(user_count):
            assert cached_fraction(layout, k, state) == gain / user_count
            missing = sum((sub.size for sub in missing_subfiles(layout, k, state)), Fraction(0))
            assert missing == 1 - gain / user_count
    expected = sum(gains, Fraction(0)) / user_count
    assert all(layout.used_memory(k) == expected for k in range(user_count))
