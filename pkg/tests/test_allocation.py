import numpy as np
import pytest

from xrcache.errors import ConfigurationError
from xrcache.models.allocation import AllocationProblem, TradeoffMode
from xrcache.models.environment import RateMap
from xrcache.services.allocation import (
    allocate,
    allocation_oracle,
    tradeoff_for,
    uniform_allocation,
    water_fill,
)

TABLE_FRACTIONS = [0.25, 0.5, 0.75, 0.5, 0.25]


def _problem(rate_map, memory, mode="multicast_aware", user_count=4, alpha=2):
    return AllocationProblem(rate_map=rate_map, total_memory=memory, user_count=user_count,
                             tradeoff=tradeoff_for(mode, alpha, user_count))


@pytest.mark.parametrize("mode", ["multicast_aware", "local_first"])
def test_table_rates_give_known_fractions(table_rates, table_memory, mode):
    allocation = allocate(_problem(table_rates, table_memory, mode))
    np.testing.assert_allclose(allocation.fractions, TABLE_FRACTIONS, atol=1e-9)
    assert allocation.m_bar == pytest.approx(0.25)
    assert allocation.t_bar == pytest.approx(1.0)
    assert allocation.gamma == pytest.approx(2.5e-4)


def test_charnes_cooper_matches_structural(table_rates, table_memory):
    problem = _problem(table_rates, table_memory)
    exact = allocate(problem)
    lp = allocate(problem, method="charnes_cooper")
    assert lp.objective == pytest.approx(exact.objective, rel=1e-5)
    np.testing.assert_allclose(lp.fractions, exact.fractions, atol=1e-5)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("mode", ["multicast_aware", "local_first"])
def test_structural_is_never_worse_than_a_floor_scan(seed, mode):
    rng = np.random.default_rng(seed)
    rate_map = RateMap(rng.uniform(0.5, 5.0, size=12))
    problem = _problem(rate_map, memory=4.0, mode=mode)
    exact = allocate(problem)
    oracle = allocation_oracle(problem)
    assert exact.objective <= oracle.objective * (1 + 1e-9)
    assert exact.used_memory <= 4.0 + 1e-9


def test_local_first_spends_memory_on_weak_states():
    rate_map = RateMap(np.array([10.0, 1.0, 10.0, 10.0]))
    local = allocate(_problem(rate_map, 1.0, "local_first"))
    aware = allocate(_problem(rate_map, 1.0, "multicast_aware"))
    assert local.fractions[1] > 0.25
    assert local.gamma <= aware.gamma * (1 + 1e-9)
    assert aware.m_bar >= local.m_bar - 1e-12


def test_water_fill_levels_the_normalized_time():
    rates = np.array([1.0, 2.0, 4.0])
    fractions, gamma = water_fill(rates, 1.5)
    assert fractions.sum() == pytest.approx(1.5)
    times = (1 - fractions) / rates
    np.testing.assert_allclose(times[fractions > 0], gamma)


def test_water_fill_respects_the_floor():
    rates = np.array([1.0, 2.0, 4.0])
    fractions, _ = water_fill(rates, 1.5, floor=0.4)
    assert fractions.min() >= 0.4 - 1e-12
    assert fractions.sum() == pytest.approx(1.5)


def test_enough_memory_caches_everything(table_rates):
    allocation = allocate(_problem(table_rates, 7.0))
    np.testing.assert_array_equal(allocation.fractions, np.ones(5))
    assert allocation.gamma == 0.0


def test_uniform_allocation(table_rates):
    allocation = uniform_allocation(table_rates, 2.25, 4)
    np.testing.assert_allclose(allocation.fractions, 0.45)
    assert allocation.tradeoff == np.inf


def test_uniform_has_no_tradeoff_value():
    with pytest.raises(ConfigurationError):
        tradeoff_for(TradeoffMode.UNIFORM, 2, 4)


def test_problem_rejects_non_positive_memory(table_rates):
    with pytest.raises(ConfigurationError):
        AllocationProblem(rate_map=table_rates, total_memory=0.0, user_count=4, tradeoff=0.5)


def test_unknown_method(table_rates, table_memory):
    with pytest.raises(ConfigurationError):
        allocate(_problem(table_rates, table_memory), method="simplex")


def _random_problem(seed, tradeoff=None):
    rng = np.random.default_rng(seed)
    states = int(rng.integers(3, 11))
    rate_map = RateMap(rng.uniform(0.5, 5.0, size=states))
    memory = float(rng.uniform(0.1, 0.9)) * states
    tradeoff = float(rng.uniform(0.05, 2.0)) if tradeoff is None else tradeoff
    return AllocationProblem(rate_map=rate_map, total_memory=memory, user_count=4, tradeoff=tradeoff)


@pytest.mark.parametrize("seed", range(100))
def test_structural_matches_the_linear_program_on_random_rooms(seed):
    problem = _random_problem(seed)
    exact = allocate(problem)
    lp = allocate(problem, method="charnes_cooper")
    assert abs(exact.objective - lp.objective) <= 1e-3 * lp.objective
    assert exact.used_memory <= problem.total_memory + 1e-9
    assert np.all((exact.fractions >= 0) & (exact.fractions <= 1))


@pytest.mark.parametrize("seed", range(20))
def test_larger_tradeoff_never_raises_floor_or_time(seed):
    allocations = [allocate(_random_problem(seed, tradeoff=phi)) for phi in (0.01, 0.1, 0.25, 0.5, 1.0, 10.0, 1e6)]
    for smaller, larger in zip(allocations, allocations[1:]):
        assert larger.m_bar <= smaller.m_bar + 1e-9
        assert larger.gamma <= smaller.gamma * (1 + 1e-9)


@pytest.mark.parametrize("user_count", [2, 4, 6])
def test_tradeoff_grows_with_alpha(table_rates, table_memory, user_count):
    phis = [tradeoff_for("multicast_aware", alpha, user_count) for alpha in range(1, user_count + 1)]
    assert phis == sorted(phis) and len(set(phis)) == len(phis)
    m_bars = [allocate(AllocationProblem(rate_map=table_rates, total_memory=table_memory,
                                         user_count=user_count, tradeoff=phi)).m_bar for phi in phis]
    assert all(b <= a + 1e-9 for a, b in zip(m_bars, m_bars[1:]))
