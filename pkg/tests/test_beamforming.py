import math

import numpy as np
import pytest

from xrcache.models.beams import BeamformingOptions, BeamProblem
from xrcache.services.beamforming import (
    build_beam_problem,
    evaluate_precoders,
    mac_rate,
    sinr_matrix,
    solve_beams,
    solve_mrt,
    solve_wmm_sca,
    solve_zero_forcing,
)
from xrcache.services.delivery import build_multicast_plan, demands_for
from xrcache.services.placement import place_sequence

FAST = BeamformingOptions(method="zero_forcing", inner_tol=1e-4)


def _random_channels(users, antennas, seed):
    rng = np.random.default_rng(seed)
    return (rng.standard_normal((users, antennas)) + 1j * rng.standard_normal((users, antennas))) / math.sqrt(2)


def _random_search(problem, samples, seed):
    """Best common rate over random unit-power precoders."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        v = rng.standard_normal((problem.antenna_count, problem.codeword_count)) \
            + 1j * rng.standard_normal((problem.antenna_count, problem.codeword_count))
        v /= np.linalg.norm(v)
        best = max(best, evaluate_precoders(problem, v))
    return best


def test_mac_rate_is_limited_by_the_weakest_subset():
    assert mac_rate([3.0]) == pytest.approx(2.0)
    assert mac_rate([1.0, 3.0]) == pytest.approx(1.0)
    assert mac_rate([3.0, 3.0]) == pytest.approx(min(2.0, math.log2(7.0) / 2))
    assert mac_rate([]) == 0.0


def test_cached_codewords_do_not_interfere():
    problem = BeamProblem.from_design(_random_channels(3, 2, 0), common=1, weights=[1.0, 1.0, 1.0])
    assert problem.codewords == ((0, 1), (0, 2), (1, 2))
    # user 0 cancels nothing it wants; only codeword (1, 2) interferes
    assert problem.interfering[0] == (2,)
    assert problem.desired[0] == (0, 1)


def test_orthogonal_users_split_power_evenly():
    problem = BeamProblem.from_design(np.eye(2), common=0, weights=[1.0, 1.0], power=1.0, noise=1.0)
    solution = solve_zero_forcing(problem, FAST)
    assert solution.common_rate == pytest.approx(math.log2(1.5), rel=1e-3)
    assert solution.total_power == pytest.approx(1.0, rel=1e-6)
    mrt = solve_mrt(problem)
    assert mrt.common_rate == pytest.approx(math.log2(1.5))


def test_power_budget_scales_precoders():
    problem = BeamProblem.from_design(np.eye(2), common=0, weights=[1.0, 1.0], power=4.0, noise=1.0)
    solution = solve_mrt(problem)
    assert solution.total_power == pytest.approx(4.0)
    assert solution.common_rate == pytest.approx(math.log2(3.0))


def test_zero_forcing_nulls_interference():
    problem = BeamProblem.from_design(_random_channels(3, 3, 1), common=0, weights=[1.0, 1.0, 1.0])
    solution = solve_zero_forcing(problem, FAST)
    gains = np.abs(problem.normalized_channels.conj() @ (solution.precoders / np.sqrt(problem.power))) ** 2
    off_diagonal = gains[~np.eye(3, dtype=bool)]
    assert np.max(off_diagonal) < 1e-12
    assert not solution.best_effort


def test_zero_forcing_flags_too_few_antennas():
    problem = BeamProblem.from_design(_random_channels(3, 1, 2), common=0, weights=[1.0, 1.0, 1.0])
    assert solve_zero_forcing(problem, FAST).best_effort


def test_weights_shape_the_rates():
    problem = BeamProblem.from_design(np.eye(2), common=0, weights=[1.0, 2.0])
    solution = solve_zero_forcing(problem, FAST)
    assert solution.rates[1] == pytest.approx(2 * solution.rates[0])
    assert np.all(solution.rates <= solution.achievable_rates * (1 + 1e-9))


def test_silent_channels_give_zero_rate():
    problem = BeamProblem.from_design(np.zeros((2, 2)), common=0, weights=[1.0, 1.0])
    for method in ("wmm_sca", "zero_forcing", "mrt"):
        solution = solve_beams(problem, BeamformingOptions(method=method))
        assert solution.common_rate == 0.0
        assert np.all(solution.rates == 0.0)


def test_problem_from_a_planned_transmission():
    layout = place_sequence([1, 2, 2, 1], 4)
    plan = build_multicast_plan(demands_for(layout, [0, 1, 2, 3]), layout, alpha=2)
    channels = _random_channels(4, 3, 5)
    problem = build_beam_problem(plan.transmissions[0], channels, power=2.0, noise=0.5)
    assert problem.receivers == (0, 1, 2)
    np.testing.assert_allclose(problem.weights, [1 / 8, 1 / 12, 1 / 12])
    np.testing.assert_array_equal(problem.channels, channels[[0, 1, 2]])
    assert problem.codeword_count == 3


def test_sinr_counts_interference_only_from_uncached_codewords():
    problem = BeamProblem.from_design(np.eye(2), common=1, weights=[1.0, 1.0])
    # one codeword for both users, nothing interferes
    precoders = np.array([[1.0], [1.0]], dtype=complex) / math.sqrt(2)
    sinr = sinr_matrix(problem, precoders)
    np.testing.assert_allclose(sinr, [[0.5], [0.5]])


def _sca_instance(seed):
    """L in {2, 4}, 2 to 4 receivers, common gain just large enough for zero-forcing to null."""
    antennas = (2, 4)[seed % 2]
    users = (2, 3, 4)[seed % 3]
    rng = np.random.default_rng(1000 + seed)
    weights = rng.uniform(0.5, 1.5, size=users)
    problem = BeamProblem.from_design(_random_channels(users, antennas, seed), common=max(0, users - antennas),
                                      weights=weights, power=10.0)
    return problem


SCA_OPTIONS = BeamformingOptions(max_iters=10, inner_tol=1e-5)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_sca_ascends_within_the_power_budget_and_keeps_its_start(seed):
    problem = _sca_instance(seed)
    start = solve_zero_forcing(problem, SCA_OPTIONS)
    assert not start.best_effort
    solution = solve_wmm_sca(problem, SCA_OPTIONS)
    assert solution.metadata["initial_method"] == "zero_forcing"
    assert all(b >= a - 1e-9 for a, b in zip(solution.trace, solution.trace[1:]))
    assert solution.trace[0] == pytest.approx(start.common_rate, abs=1e-9)
    # power_trace is kept with the budget normalized to one
    assert max(solution.power_trace) <= 1.0 + 1e-6
    assert solution.total_power <= problem.power * (1 + 1e-6)
    assert solution.common_rate >= start.common_rate - 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_sca_is_not_beaten_by_random_search(seed):
    rng = np.random.default_rng(2000 + seed)
    problem = BeamProblem.from_design(_random_channels(3, 2, 100 + seed), common=1,
                                      weights=rng.uniform(0.5, 1.5, size=3), power=10.0)
    solution = solve_wmm_sca(problem, BeamformingOptions(max_iters=20, inner_tol=1e-5))
    assert solution.common_rate >= 0.98 * _random_search(problem, 100_000, seed=seed)


@pytest.mark.parametrize("method", ["mrt", "zero_forcing", "wmm_sca"])
def test_single_user_reaches_the_matched_filter_rate(method):
    channel = _random_channels(1, 4, 11)
    problem = BeamProblem.from_design(channel, common=0, weights=[1.0], power=3.0, noise=0.5)
    expected = math.log2(1 + np.sum(np.abs(channel) ** 2) * 3.0 / 0.5)
    solution = solve_beams(problem, BeamformingOptions(method=method, inner_tol=1e-7))
    assert solution.common_rate == pytest.approx(expected, rel=1e-4)
