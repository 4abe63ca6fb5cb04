import logging

import click
from rich.table import Table

from ..repositories import AllocationRepository
from ..services.experiments import build_allocation, resolve_rate_map
from ..services.metrics import approx_total_time
from .context import RunContext, pass_run

logger = logging.getLogger(__name__)


@click.command("allocate")
@click.option("--tradeoff", type=click.Choice(["multicast_aware", "local_first", "uniform"]), default=None,
              help="Overrides allocation.tradeoff of the scenario.")
@pass_run
def allocate_command(run: RunContext, tradeoff):
    """Allocate cache memory across states and write allocation.csv."""
    scenario = run.scenario()
    rate_map = resolve_rate_map(scenario)
    mode = tradeoff or scenario.allocation.tradeoff
    allocation = build_allocation(scenario, rate_map, mode)
    path = AllocationRepository().save(allocation, run.output("allocation.csv"), run.meta(scenario, tradeoff=mode))
    approx = approx_total_time(allocation, rate_map, scenario.user_count, scenario.alpha)
    logger.info("m_bar=%.6f t_bar=%.4f approximate time %.4e", allocation.m_bar, allocation.t_bar, approx)

    if allocation.state_count <= 20:
        table = Table(title=f"Allocation ({mode})")
        for column in ("state", "r", "m", "t"):
            table.add_column(column, justify="right")
        for s, (r, m, t) in enumerate(zip(rate_map.rates, allocation.fractions, allocation.gains)):
            table.add_row(str(s), f"{r:.6g}", f"{m:.6f}", f"{t:.4f}")
        run.console.print(table)
    run.console.print(f"allocation written to {path}")
