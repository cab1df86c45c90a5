"""Command-line interface: ingest, hist, twins, run."""

from .app import EXIT_CONFLICT, EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, CommandError, cli, exit_codes
from .hist import cmd_hist, hist
from .ingest import cmd_ingest, ingest
from .run import cmd_run, load_experiment_config, run
from .twins import cmd_twins, twins

cli.add_command(ingest)
cli.add_command(hist)
cli.add_command(twins)
cli.add_command(run)

__all__ = [
    "EXIT_CONFLICT",
    "EXIT_INPUT",
    "EXIT_NUMERICAL",
    "EXIT_OK",
    "CommandError",
    "cli",
    "cmd_hist",
    "cmd_ingest",
    "cmd_run",
    "cmd_twins",
    "exit_codes",
    "load_experiment_config",
]
