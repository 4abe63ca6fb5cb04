import click
from rich.table import Table

from ..errors import EXIT_RUNTIME
from ..services.examples import reproduce_examples
from .context import RunContext, pass_run


@click.command("reproduce-examples")
@pass_run
def reproduce_examples_command(run: RunContext):
    """Check the worked examples end to end and print a PASS/FAIL summary."""
    results = reproduce_examples()
    table = Table(title="Worked examples")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    for result in results:
        status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(result.name, status, result.detail)
    run.console.print(table)

    failed = [r.name for r in results if not r.passed]
    if failed:
        run.console.print(f"FAIL: {', '.join(failed)}")
        raise click.exceptions.Exit(EXIT_RUNTIME)
    run.console.print(f"PASS: {len(results)} checks")
