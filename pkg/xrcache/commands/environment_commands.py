import logging

import click

from ..repositories import RateMapRepository
from ..services.environment import border_snr_db, build_grid, calibrate_power, estimate_rate_map
from .context import RunContext, pass_run

logger = logging.getLogger(__name__)


@click.command("rate-map")
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Monte Carlo samples per state.")
@pass_run
def rate_map_command(run: RunContext, samples):
    """Estimate the expected rate of every state and write rate_map.csv."""
    scenario = run.scenario()
    env = scenario.environment
    grid = build_grid(env)
    power = calibrate_power(env, grid)
    rate_map = estimate_rate_map(grid, env, n_samples=samples, transmit_power=power)
    path = RateMapRepository().save(
        rate_map, run.output("rate_map.csv"),
        run.meta(scenario, transmit_power=power, border_snr_db=border_snr_db(power, grid, env)),
    )
    logger.info("S=%d, P_T=%.4g, rates in [%.4g, %.4g]", len(grid), power, rate_map.rates.min(),
                rate_map.rates.max())
    run.console.print(f"rate map written to {path}")
