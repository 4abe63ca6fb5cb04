from .allocation_commands import allocate_command
from .delivery_commands import plan_command, solve_beams_command
from .environment_commands import rate_map_command
from .example_commands import reproduce_examples_command
from .experiment_commands import experiment_command


def register_commands(cli):
    cli.add_command(rate_map_command)
    cli.add_command(allocate_command)
    cli.add_command(plan_command)
    cli.add_command(solve_beams_command)
    cli.add_command(experiment_command)
    cli.add_command(reproduce_examples_command)
