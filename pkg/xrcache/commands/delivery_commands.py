import logging

import click
import numpy as np

from ..errors import ConfigurationError
from ..repositories import BeamRepository, LayoutRepository, PlanRepository, ReportRepository
from ..services.delivery import deliver, demands_for, plan_hash
from ..services.environment import build_grid, calibrate_power, draw_channels
from ..services.experiments import build_allocation, drop_seed, resolve_rate_map, solve_transmission
from ..services.metrics import total_time
from ..services.placement import place
from .context import RunContext, pass_run

logger = logging.getLogger(__name__)


def _user_states(scenario, seed: int, state_count: int):
    states = scenario.delivery.user_states
    if states is None:
        rng = np.random.default_rng(seed)
        return [int(s) for s in rng.integers(0, state_count, size=scenario.user_count)]
    if len(states) != scenario.user_count:
        raise ConfigurationError(f"{len(states)} user states for {scenario.user_count} users",
                                 field="delivery.user_states")
    if any(not 0 <= s < state_count for s in states):
        raise ConfigurationError(f"user states must lie in [0, {state_count})", field="delivery.user_states")
    return list(states)


@click.command("plan")
@click.option("--mode", type=click.Choice(["multicast", "phantom", "unicast"]), default=None,
              help="Overrides delivery.mode of the scenario.")
@pass_run
def plan_command(run: RunContext, mode):
    """Place caches for one drop and write its delivery plan (plan.json, layout.json)."""
    scenario = run.scenario()
    mode = mode or scenario.delivery.mode
    seed = drop_seed(scenario.experiment.master_seed, 0)
    rate_map = resolve_rate_map(scenario)
    allocation = build_allocation(scenario, rate_map, scenario.allocation.tradeoff)
    states = _user_states(scenario, seed, len(rate_map))
    layout = place(allocation, states=states)
    demands = demands_for(layout, states)
    plan = deliver(demands, layout, scenario.alpha, mode, scenario.t_target)

    meta = run.meta(scenario, mode=mode)
    context = {
        "seed": seed,
        "mode": mode,
        "user_states": states,
        "gains": {str(s): str(g) for s, g in layout.gains.items()},
    }
    LayoutRepository().save(layout, run.output("layout.json"), meta)
    path = PlanRepository().save(plan, run.output("plan.json"), meta, context=context)
    digest = plan_hash(plan)
    logger.info("Plan %s: %d transmissions, common gain %d, phantoms %s", digest[:12], len(plan),
                plan.common_gain, sorted(plan.phantom_users))
    run.console.print(f"plan {digest} written to {path}")


@click.command("solve-beams")
@click.argument("plan_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", is_flag=True, help="Write the per-iteration objective of every solve.")
@pass_run
def solve_beams_command(run: RunContext, plan_file, trace):
    """Design beamformers for every transmission of a stored plan."""
    scenario = run.scenario()
    stored = PlanRepository().load(plan_file)
    states = stored.context.get("user_states")
    if states is None:
        raise ConfigurationError("plan file has no user_states context", field="plan")
    seed = int(stored.context.get("seed", drop_seed(scenario.experiment.master_seed, 0)))
    env = scenario.environment
    grid = build_grid(env)
    power = calibrate_power(env, grid)
    channels = draw_channels(grid, states, env, np.random.default_rng(seed))
    solutions = [
        solve_transmission(t, channels, power, env.noise_power, scenario.beamforming)
        for t in stored.plan.transmissions
    ]
    report = total_time(stored.plan, solutions, scheme=stored.context.get("mode", ""), seed=seed,
                        rate_scale=env.rate_scale)

    meta = run.meta(scenario, plan_hash=stored.plan_hash, method=scenario.beamforming.method)
    BeamRepository().save(solutions, run.output("beams.json"), meta, plan_hash=stored.plan_hash)
    repository = ReportRepository()
    repository.save([report], run.output("beams_report.csv"), meta)
    if trace:
        repository.save_trace(solutions, run.output("beams_trace.csv"), meta)
    served = ", ".join(str(x) for x in report.served)
    logger.info("Plan %s re-solved: served [%s]", stored.plan_hash[:12], served)
    run.console.print(f"plan {stored.plan_hash}: T_T={report.total_time:.6g}, "
                      f"symmetric rate {report.symmetric_rate:.6g}")
