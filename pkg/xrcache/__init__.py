"""Location-dependent coded caching for multi-antenna wireless XR delivery."""
import logging
import sys
from typing import Optional, Sequence

import click
from pydantic import ValidationError
from rich.logging import RichHandler

from .commands import register_commands
from .commands.context import RunContext
from .config import Config
from .errors import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, XRCacheError

__version__ = Config.VERSION


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(name)s: %(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=False, show_path=False)],
        force=True,
    )
    # cvxpy logs every compilation at INFO
    logging.getLogger("cvxpy").setLevel(logging.WARNING)


def create_cli() -> click.Group:
    @click.group(context_settings={"help_option_names": ["-h", "--help"]})
    @click.version_option(Config.VERSION, prog_name="xrcache")
    @click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                  help="Scenario file (YAML or TOML).")
    @click.option("--output-dir", default=lambda: Config.OUTPUT_DIR, show_default="results",
                  help="Directory for every output file.")
    @click.option("--seed", type=int, default=None, help="Overrides every seed of the scenario.")
    @click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker cap for experiments.")
    @click.option("-v", "--verbose", count=True, help="More logging (repeatable).")
    @click.option("-q", "--quiet", is_flag=True, help="Warnings and errors only.")
    @click.pass_context
    def cli(ctx, config_path, output_dir, seed, threads, verbose, quiet):
        """Coded caching simulator for multi-antenna wireless XR."""
        if quiet:
            level = "WARNING"
        elif verbose:
            level = "DEBUG"
        else:
            level = Config.LOG_LEVEL
        configure_logging(level)
        ctx.obj = RunContext(config_path=config_path, output_dir=output_dir, seed=seed, threads=threads)

    register_commands(cli)
    return cli


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand and return its exit code.

    0 on success, 2 for usage and configuration errors, 3 for runtime and
    solver failures. Failures print a single ``error: <category>: <message>``
    line on stderr.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    cli = create_cli()
    if not argv:
        click.echo(cli.get_help(click.Context(cli, info_name="xrcache")))
        return EXIT_CONFIG
    try:
        result = cli.main(args=argv, prog_name="xrcache", standalone_mode=False)
    except click.exceptions.Exit as exit_:
        return exit_.exit_code
    except click.exceptions.Abort:
        click.echo("error: aborted", err=True)
        return EXIT_RUNTIME
    except click.UsageError as err:
        click.echo(f"error: usage: {err.format_message()}", err=True)
        return EXIT_CONFIG
    except click.ClickException as err:
        click.echo(f"error: usage: {err.format_message()}", err=True)
        return EXIT_CONFIG
    except ValidationError as err:
        first = err.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        click.echo(f"error: config: {location}: {first['msg']}", err=True)
        return EXIT_CONFIG
    except XRCacheError as err:
        click.echo(f"error: {err.category}: {err}", err=True)
        return err.exit_code
    return result if isinstance(result, int) else EXIT_OK
