"""Command group, shared options and exit-code mapping."""

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import rich_click as click
from calibration import (
    CalibrationSnapshot,
    SnapshotConflictError,
    SnapshotKey,
    SnapshotNotFoundError,
    SnapshotStore,
    TimestampSelector,
)
from config import APP_VERSION, settings
from ensemble import EnsembleTrainingError
from hybrid import DivergenceError
from sim import StateValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONFLICT = 2
EXIT_NUMERICAL = 3


class CommandError(click.ClickException):
    """Failure reported to the user with a specific exit code."""

    def __init__(self, message: str, exit_code: int = EXIT_INPUT):
        super().__init__(message)
        self.exit_code = exit_code


@contextmanager
def exit_codes():
    """Translate domain errors into CommandError with the stable exit codes."""
    try:
        yield
    except SnapshotConflictError as e:
        raise CommandError(str(e), EXIT_CONFLICT)
    except (DivergenceError, EnsembleTrainingError, StateValidationError) as e:
        raise CommandError(str(e), EXIT_NUMERICAL)
    except (ValueError, LookupError, OSError) as e:
        raise CommandError(str(e), EXIT_INPUT)


class QtwinsGroup(click.RichGroup):
    """Group whose usage errors exit 1; exit code 2 is reserved for store conflicts."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_INPUT
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_INPUT
            raise


@dataclass
class CliState:
    store: Path
    seed: int | None = None
    workers: int | None = None


def resolve_snapshot(store_path: Path, key_text: str) -> CalibrationSnapshot:
    """Load ``backend@timestamp``, or the newest snapshot when only a backend is given."""
    store = SnapshotStore(store_path)
    if "@" in key_text:
        return store.load_key(SnapshotKey.parse(key_text))
    timestamps = store.timestamps(key_text)
    if not timestamps:
        raise SnapshotNotFoundError(f"no {key_text} snapshots in {store_path}")
    return store.load(key_text, timestamps[-1], TimestampSelector.EXACT)


@click.group(cls=QtwinsGroup)
@click.option(
    "--store",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Snapshot store directory (default: QTWINS_STORE_PATH or ./quantum_database).",
)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Master seed.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Maximum concurrent ensemble members.")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.option("--log-file", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Also log to a file.")
@click.version_option(APP_VERSION, prog_name="qtwins")
@click.pass_context
def cli(ctx: click.Context, store: Path | None, seed: int | None, workers: int | None, verbose: bool, log_file):
    """Quantum digital twins from calibration data, with hybrid deep ensembles."""
    from main import setup_logging

    setup_logging("DEBUG" if verbose else None, log_file)
    ctx.obj = CliState(store=store or settings.store_path, seed=seed, workers=workers or settings.workers)
