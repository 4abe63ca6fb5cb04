import logging

import click
from rich.table import Table

from ..models.scenario import PRESETS, SCHEMES
from ..repositories import ReportRepository
from ..services.experiments import run_cdf_experiment, run_sweep
from ..services.resilience import get_solver
from ..utils import cache
from .context import RunContext, pass_run

logger = logging.getLogger(__name__)


def _render(result, console):
    table = Table(title="Delivery time T_T [s]")
    for column in ("point", "scheme", "drops", "mean", "p95", "iqr", "censored"):
        table.add_column(column, justify="left" if column == "scheme" else "right")
    for point in result.points:
        for summary in result.summaries[point].values():
            table.add_row(
                "-" if point is None else f"{result.parameter}={point:g}",
                summary.scheme,
                str(summary.drops),
                f"{summary.mean:.4g}",
                f"{summary.p95:.4g}",
                f"{summary.iqr:.4g}",
                str(summary.censored),
            )
    console.print(table)


@click.command("experiment")
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None,
              help="Run a built-in scenario instead of --config.")
@click.option("--drops", type=click.IntRange(min=1), default=None, help="Overrides experiment.drops.")
@click.option("--schemes", default=None, help="Comma-separated scheme names.")
@pass_run
def experiment_command(run: RunContext, preset, drops, schemes):
    """Monte Carlo comparison of schemes; a sweep when the scenario defines one."""
    scenario = run.scenario(preset)
    names = [s.strip() for s in schemes.split(",") if s.strip()] if schemes else None
    if names:
        unknown = sorted(set(names) - set(SCHEMES))
        if unknown:
            raise click.BadParameter(f"unknown schemes {unknown}; choose from {sorted(SCHEMES)}",
                                     param_hint="--schemes")

    if scenario.sweep is not None:
        sweep = scenario.sweep.model_copy(update={"drops": drops}) if drops else scenario.sweep
        result = run_sweep(scenario, sweep, names, run.threads)
    else:
        result = run_cdf_experiment(scenario, names, drops, run.threads)

    meta = run.meta(scenario, schemes=list(result.schemes))
    repository = ReportRepository()
    repository.save(result.reports, run.output("drops.csv"), meta)
    repository.save_aggregate(result, run.output("aggregate.csv"), meta)
    repository.save_cdf(result, run.output("cdf.csv"), meta)

    _render(result, run.console)
    logger.info("Solver stats: %s", get_solver().snapshot())
    logger.debug("Cache stats: %s", cache.stats())
    run.console.print(f"results written to {run.output_dir}")
