"""
Memory allocation across states.

The allocation minimizes gamma / (m_bar + phi) where gamma bounds the
normalized delivery time (1 - m(s)) / r(s) of every state and m_bar is the
smallest cached fraction. For a fixed floor m_bar the best gamma comes from
water-filling, and along m_bar the objective is linear-fractional between the
breakpoints of that water-filling, so the optimum sits on one of them.
"""
import logging
from typing import Optional, Tuple

import cvxpy as cp
import numpy as np

from ..config import Config
from ..errors import ConfigurationError, DomainError, SolverError
from ..models.allocation import AllocationProblem, MemoryAllocation, TradeoffMode
from ..models.environment import RateMap
from .resilience import SOLVED, get_solver

logger = logging.getLogger(__name__)

_FLOOR_TOL = 1e-12
ORACLE_MAX_STATES = 50


def tradeoff_for(mode, alpha: int, user_count: int, local_first_factor: Optional[float] = None) -> float:
    mode = TradeoffMode(mode)
    base = alpha / user_count
    if mode == TradeoffMode.MULTICAST_AWARE:
        return base
    if mode == TradeoffMode.LOCAL_FIRST:
        factor = Config.LOCAL_FIRST_FACTOR if local_first_factor is None else local_first_factor
        return factor * base
    raise ConfigurationError("uniform placement has no trade-off parameter", field="tradeoff")


def water_fill(rates, total_memory: float, floor: float = 0.0) -> Tuple[np.ndarray, float]:
    """
    Fill memory so that (1 - m(s)) / r(s) is level across states above the floor.

    Returns:
        (m, gamma) with m(s) = max(floor, 1 - gamma r(s)) and sum(m) = min(M, S).
    """
    rates = np.asarray(rates, dtype=float)
    states = rates.shape[0]
    if total_memory >= states:
        return np.ones(states), 0.0
    cap = total_memory / states
    if floor < -_FLOOR_TOL or floor > cap * (1 + 1e-12) + _FLOOR_TOL:
        raise DomainError(f"floor {floor} outside [0, {cap}]")
    floor = min(max(floor, 0.0), cap)

    # the highest-rate states reach the floor first
    order = np.argsort(-rates, kind="stable")
    pinned = 0
    level = 0.0
    while pinned < states:
        active = order[pinned:]
        level = (active.size + pinned * floor - total_memory) / rates[active].sum()
        if 1.0 - level * rates[order[pinned]] < floor:
            pinned += 1
            continue
        break

    fractions = np.full(states, floor)
    if pinned < states:
        active = order[pinned:]
        fractions[active] = 1.0 - max(level, 0.0) * rates[active]
    fractions = np.clip(fractions, 0.0, 1.0)
    return fractions, float(np.max((1.0 - fractions) / rates))


def _objective(fractions: np.ndarray, gamma: float, tradeoff: float) -> float:
    return gamma / (float(np.min(fractions)) + tradeoff)


def _breakpoints(rates: np.ndarray, total_memory: float) -> np.ndarray:
    """Floors at which one more state becomes pinned by the water-filling."""
    states = rates.shape[0]
    ordered = np.sort(rates)[::-1]
    tail = np.cumsum(ordered[::-1])[::-1]
    j = np.arange(1, states + 1)
    points = (tail - ordered * (states - j + 1 - total_memory)) / (tail + ordered * (j - 1))
    cap = total_memory / states
    return points[(points >= 0.0) & (points <= cap)]


def _finalize(fractions, problem: AllocationProblem) -> MemoryAllocation:
    fractions = np.clip(np.asarray(fractions, dtype=float), 0.0, 1.0)
    budget = min(problem.total_memory, problem.state_count)
    used = fractions.sum()
    if used > budget:
        fractions = fractions * (budget / used)
    gamma = float(np.max((1.0 - fractions) / problem.rates))
    return MemoryAllocation(fractions=fractions, user_count=problem.user_count,
                            tradeoff=problem.tradeoff, gamma=gamma)


def _allocate_structural(problem: AllocationProblem) -> MemoryAllocation:
    rates = problem.rates
    cap = problem.total_memory / problem.state_count
    candidates = np.unique(np.concatenate([[0.0, cap], _breakpoints(rates, problem.total_memory)]))
    best, best_value = None, np.inf
    for floor in candidates:
        fractions, gamma = water_fill(rates, problem.total_memory, floor)
        value = _objective(fractions, gamma, problem.tradeoff)
        if value < best_value * (1 - 1e-12):
            best, best_value = fractions, value
    return _finalize(best, problem)


def _allocate_charnes_cooper(problem: AllocationProblem) -> MemoryAllocation:
    """Solve the linear program obtained after the Charnes-Cooper substitution."""
    # the optimum is invariant to a uniform rescaling of the rates
    rates = problem.rates / problem.rates.max()
    states = problem.state_count
    scaled_m = cp.Variable(states, nonneg=True)
    scaled_gamma = cp.Variable(nonneg=True)
    scaled_floor = cp.Variable(nonneg=True)
    xi = cp.Variable(nonneg=True)
    constraints = [
        cp.multiply(1.0 / rates, xi - scaled_m) <= scaled_gamma,
        scaled_floor <= scaled_m,
        scaled_m <= xi,
        cp.sum(scaled_m) <= problem.total_memory * xi,
        scaled_floor + problem.tradeoff * xi == 1,
    ]
    lp = cp.Problem(cp.Minimize(scaled_gamma), constraints)
    status, _ = get_solver().call(lp)
    if status not in SOLVED or xi.value is None or xi.value <= 0:
        raise SolverError(f"Charnes-Cooper program ended with status {status}",
                          iterate={"xi": None if xi.value is None else float(xi.value)})
    return _finalize(scaled_m.value / float(xi.value), problem)


def allocate(problem: AllocationProblem, method: str = "structural") -> MemoryAllocation:
    """
    Allocate memory across states.

    Args:
        problem: rates, memory budget, user count and trade-off.
        method: "structural" (exact water-filling search) or "charnes_cooper" (LP via cvxpy).
    """
    if problem.total_memory >= problem.state_count:
        return _finalize(np.ones(problem.state_count), problem)
    if method == "structural":
        allocation = _allocate_structural(problem)
    elif method == "charnes_cooper":
        allocation = _allocate_charnes_cooper(problem)
    else:
        raise ConfigurationError(f"unknown allocation method {method!r}", field="method")
    logger.debug("Allocated S=%d M=%.4g phi=%.4g: m_bar=%.6f gamma=%.6g",
                 problem.state_count, problem.total_memory, problem.tradeoff,
                 allocation.m_bar, allocation.gamma)
    return allocation


def allocation_oracle(problem: AllocationProblem, grid_points: int = 4001) -> MemoryAllocation:
    """Brute-force scan over the floor; test-scale only."""
    if problem.state_count > ORACLE_MAX_STATES:
        raise ConfigurationError(
            f"oracle limited to {ORACLE_MAX_STATES} states, got {problem.state_count}", field="rates"
        )
    if problem.total_memory >= problem.state_count:
        return _finalize(np.ones(problem.state_count), problem)
    best, best_value = None, np.inf
    for floor in np.linspace(0.0, problem.total_memory / problem.state_count, grid_points):
        fractions, gamma = water_fill(problem.rates, problem.total_memory, floor)
        value = _objective(fractions, gamma, problem.tradeoff)
        if value < best_value:
            best, best_value = fractions, value
    return _finalize(best, problem)


def uniform_allocation(rate_map: RateMap, total_memory: float, user_count: int) -> MemoryAllocation:
    """Same fraction M/S in every state (the MS baseline)."""
    states = len(rate_map)
    if not total_memory > 0:
        raise ConfigurationError("total memory must be positive", field="total_memory")
    fractions = np.full(states, min(total_memory / states, 1.0))
    gamma = float(np.max((1.0 - fractions) / rate_map.rates))
    return MemoryAllocation(fractions=fractions, user_count=user_count, tradeoff=np.inf, gamma=gamma)
