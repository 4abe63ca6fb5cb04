"""
Monte Carlo harness.

A drop places K users uniformly over the states, draws their channels and runs
one scheme end to end: allocation, placement, delivery plan, one beamformer
per transmission, delivery time. Every scheme sees the same states and
channels for a given drop seed.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..errors import ConfigurationError, DropError, XRCacheError
from ..models.allocation import AllocationProblem, MemoryAllocation, TradeoffMode
from ..models.beams import BeamformerSolution, BeamformingOptions
from ..models.environment import ChannelRealization, RateMap, StateGrid
from ..models.plan import Transmission, TransmissionPlan
from ..models.reports import AggregateResult, DeliveryReport, SchemeSummary
from ..models.scenario import SCHEMES, Scenario, SchemeSpec, SweepSpec
from ..repositories.rate_map_repository import RateMapRepository
from ..utils.cache import _make_key, get_or_compute
from .allocation import allocate, tradeoff_for, uniform_allocation
from .beamforming import build_beam_problem, solve_beams
from .delivery import deliver, demands_for
from .environment import build_grid, calibrate_power, draw_channels, estimate_rate_map
from .metrics import total_time
from .placement import place

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScenarioContext:
    """Per-scenario artifacts shared by every drop: grid, calibrated power and rate map."""

    scenario: Scenario
    grid: StateGrid
    transmit_power: float
    rate_map: RateMap

    @property
    def key(self) -> str:
        return self.scenario.fingerprint()


@dataclass(frozen=True, eq=False)
class DropOutcome:
    report: DeliveryReport
    plan: TransmissionPlan
    solutions: Tuple[Optional[BeamformerSolution], ...]
    user_states: Tuple[int, ...]


def scheme_spec(name: str) -> SchemeSpec:
    try:
        return SCHEMES[name]
    except KeyError:
        raise ConfigurationError(f"unknown scheme {name!r}", field="schemes") from None


def _load_rate_map(scenario: Scenario, grid: StateGrid, transmit_power: float) -> RateMap:
    settings = scenario.allocation
    if settings.rates is not None:
        rate_map = RateMap(np.asarray(settings.rates, dtype=float))
    elif settings.rate_map_csv is not None:
        rate_map = RateMapRepository().load(settings.rate_map_csv)
    else:
        return estimate_rate_map(grid, scenario.environment, transmit_power=transmit_power)
    if len(rate_map) != len(grid):
        raise ConfigurationError(f"rate map has {len(rate_map)} states, the room has {len(grid)}",
                                 field="rates")
    return rate_map


def prepare(scenario: Scenario) -> ScenarioContext:
    """Grid, power and rate map of a scenario, cached by its fingerprint."""

    def build() -> ScenarioContext:
        grid = build_grid(scenario.environment)
        power = calibrate_power(scenario.environment, grid)
        rate_map = _load_rate_map(scenario, grid, power)
        logger.info("Prepared scenario %s: S=%d, P_T=%.4g", scenario.fingerprint(), len(grid), power)
        return ScenarioContext(scenario=scenario, grid=grid, transmit_power=power, rate_map=rate_map)

    return get_or_compute(_make_key("scenario", scenario.fingerprint()), build)


def resolve_rate_map(scenario: Scenario) -> RateMap:
    """Injected rates as given, otherwise the estimated map of the scenario room."""
    if scenario.allocation.rates is not None:
        return RateMap(np.asarray(scenario.allocation.rates, dtype=float))
    return prepare(scenario).rate_map


def build_allocation(scenario: Scenario, rate_map: RateMap, mode) -> MemoryAllocation:
    mode = TradeoffMode(mode)
    if mode == TradeoffMode.UNIFORM:
        return uniform_allocation(rate_map, scenario.total_memory, scenario.user_count)
    settings = scenario.allocation
    tradeoff = tradeoff_for(mode, scenario.alpha, scenario.user_count, settings.local_first_factor)
    problem = AllocationProblem(rate_map=rate_map, total_memory=scenario.total_memory,
                                user_count=scenario.user_count, tradeoff=tradeoff)
    return allocate(problem, method=settings.method)


def allocation_for(context: ScenarioContext, scheme: str) -> MemoryAllocation:
    """Memory allocation of a scheme, computed once per scenario."""
    spec = scheme_spec(scheme)
    return get_or_compute(
        _make_key("allocation", context.key, spec.tradeoff.value),
        lambda: build_allocation(context.scenario, context.rate_map, spec.tradeoff),
    )


def drop_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def draw_drop(context: ScenarioContext, seed: int) -> Tuple[Tuple[int, ...], ChannelRealization]:
    """User states (uniform over the grid) and their channels for one drop seed."""
    rng = np.random.default_rng(seed)
    states = tuple(int(s) for s in rng.integers(0, len(context.grid), size=context.scenario.user_count))
    channels = draw_channels(context.grid, states, context.scenario.environment, rng)
    return states, channels


def solve_transmission(
    transmission: Transmission,
    channels: ChannelRealization,
    transmit_power: float,
    noise: float,
    options: BeamformingOptions,
) -> Optional[BeamformerSolution]:
    if not transmission.receivers:
        return None
    problem = build_beam_problem(transmission, channels, transmit_power, noise)
    return solve_beams(problem, options)


def _context_row(scenario: Scenario) -> Dict[str, float]:
    env = scenario.environment
    return {
        "S": scenario.state_count,
        "L": env.antenna_count,
        "alpha": env.spatial_multiplexing_gain,
        "M": scenario.total_memory,
        "sigma": env.shadowing_std_db,
        "border_snr": env.border_snr_db,
    }


def execute_drop(
    scenario: Scenario,
    scheme: str,
    seed: int,
    context: Optional[ScenarioContext] = None,
    user_states: Optional[Sequence[int]] = None,
) -> DropOutcome:
    """One drop with every intermediate artifact kept."""
    spec = scheme_spec(scheme)
    try:
        context = context or prepare(scenario)
        allocation = allocation_for(context, scheme)
        states, channels = draw_drop(context, seed)
        if user_states is not None:
            states = tuple(int(s) for s in user_states)
            channels = draw_channels(context.grid, states, scenario.environment, np.random.default_rng(seed))
        layout = place(allocation, states=states)
        demands = demands_for(layout, states)
        plan = deliver(demands, layout, scenario.alpha, spec.delivery, scenario.t_target)
        env = scenario.environment
        solutions = tuple(
            solve_transmission(t, channels, context.transmit_power, env.noise_power, scenario.beamforming)
            for t in plan.transmissions
        )
        report = total_time(plan, solutions, scheme=scheme, seed=seed, rate_scale=env.rate_scale,
                            context=_context_row(scenario))
    except XRCacheError as err:
        raise DropError(scheme, seed, err) from err
    logger.debug("Drop %s seed=%d: %d transmissions, T_T=%.4g", scheme, seed, len(plan), report.total_time)
    return DropOutcome(report=report, plan=plan, solutions=solutions, user_states=states)


def run_drop(scenario: Scenario, scheme: str, seed: int, context: Optional[ScenarioContext] = None) -> DeliveryReport:
    """
    Delivery report of one scheme on one drop; deterministic in the seed.

    Raises:
        DropError: any library failure, with the scheme and seed attached.
    """
    return execute_drop(scenario, scheme, seed, context).report


# ============================================================================
# Statistics
# ============================================================================

def percentile_95(samples) -> float:
    return float(np.percentile(np.asarray(samples, dtype=float), 95, method="higher"))


def interquartile_range(samples) -> float:
    samples = np.asarray(samples, dtype=float)
    upper = np.percentile(samples, 75, method="higher")
    if np.isinf(upper):
        return float("inf")
    return float(upper - np.percentile(samples, 25, method="higher"))


def finite_mean(samples) -> float:
    samples = np.asarray(samples, dtype=float)
    finite = samples[np.isfinite(samples)]
    return float(np.mean(finite)) if finite.size else float("inf")


def bootstrap_confidence(a, b, statistic: Callable = percentile_95, resamples: int = 1000, seed: int = 0) -> float:
    """
    Fraction of paired resamples where statistic(a*) >= statistic(b*).

    Rows are drawn with replacement and the same rows are taken from a and b,
    so 2-D inputs keep several per-drop columns together.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape or a.size == 0:
        raise ValueError("paired samples of equal nonzero length are required")
    rng = np.random.default_rng(seed)
    rows = a.shape[0]
    wins = 0
    for _ in range(resamples):
        index = rng.integers(0, rows, size=rows)
        if statistic(a[index]) >= statistic(b[index]):
            wins += 1
    return wins / resamples


def summarize(reports: Sequence[DeliveryReport], schemes: Sequence[str]) -> Dict[str, SchemeSummary]:
    summaries = {}
    for scheme in schemes:
        picked = sorted((r for r in reports if r.scheme == scheme), key=lambda r: r.seed)
        samples = np.array([r.total_time for r in picked], dtype=float)
        summaries[scheme] = SchemeSummary(scheme=scheme, samples=samples,
                                          censored=sum(1 for r in picked if r.censored))
    return summaries


# ============================================================================
# Experiments
# ============================================================================

def run_cdf_experiment(
    scenario: Scenario,
    schemes: Optional[Sequence[str]] = None,
    n_drops: Optional[int] = None,
    threads: Optional[int] = None,
) -> AggregateResult:
    """Sorted delivery-time samples of every scheme over common-random drops."""
    from ..tasks import run_drops

    schemes = list(schemes or scenario.experiment.schemes)
    for name in schemes:
        scheme_spec(name)
    n_drops = n_drops or scenario.experiment.drops
    if n_drops < 1:
        raise ConfigurationError("n_drops must be at least 1", field="drops")
    context = prepare(scenario)
    seeds = [drop_seed(scenario.experiment.master_seed, index) for index in range(n_drops)]
    logger.info("Running %d drops x %d schemes", n_drops, len(schemes))
    reports = run_drops(scenario, schemes, seeds, threads=threads, context=context)
    return AggregateResult(parameter=None, points=(None,), summaries={None: summarize(reports, schemes)},
                           reports=tuple(reports))


def run_sweep(
    scenario: Scenario,
    sweep: Optional[SweepSpec] = None,
    schemes: Optional[Sequence[str]] = None,
    threads: Optional[int] = None,
) -> AggregateResult:
    """One CDF experiment per swept value, with the same drop seeds at every point."""
    sweep = sweep or scenario.sweep
    if sweep is None:
        raise ConfigurationError("no sweep section given", field="sweep")
    summaries, reports = {}, []
    for value in sweep.values:
        try:
            point = scenario.with_value(sweep.parameter, value)
        except ValidationError as err:
            raise ConfigurationError(f"{sweep.parameter}={value} gives an invalid scenario: {err.errors()[0]['msg']}",
                                     field="sweep") from err
        logger.info("Sweep %s=%s", sweep.parameter, value)
        result = run_cdf_experiment(point, schemes, sweep.drops, threads)
        summaries[value] = result.summaries[None]
        reports.extend(result.reports)
    return AggregateResult(parameter=sweep.parameter, points=tuple(sweep.values), summaries=summaries,
                           reports=tuple(reports))


def scheme_gap(result: AggregateResult, baseline: str, scheme: str, point=None, statistic: Callable = finite_mean) -> float:
    """statistic(baseline) - statistic(scheme) at one point."""
    return statistic(result.summary(baseline, point).samples) - statistic(result.summary(scheme, point).samples)
