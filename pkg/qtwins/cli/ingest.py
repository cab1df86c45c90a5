"""``qtwins ingest``: parse a calibration file into the store."""

import logging
from pathlib import Path

import rich_click as click
from calibration import SnapshotFormat, SnapshotKey, infer_csv_provenance, parse_snapshot, store_snapshot

from .app import CliState, exit_codes

logger = logging.getLogger(__name__)


def detect_format(path: Path) -> SnapshotFormat:
    return SnapshotFormat.CALIBRATION_CSV if path.suffix.lower() == ".csv" else SnapshotFormat.CANONICAL_JSON


def cmd_ingest(
    input_path: Path,
    store_path: Path,
    fmt: SnapshotFormat | str | None = None,
    backend_name: str | None = None,
    timestamp: str | None = None,
) -> SnapshotKey:
    """Parse ``input_path`` and store it; CSV provenance falls back to the file name."""
    input_path = Path(input_path)
    fmt = SnapshotFormat(fmt) if fmt else detect_format(input_path)
    if fmt is SnapshotFormat.CALIBRATION_CSV and (backend_name is None or timestamp is None):
        inferred = infer_csv_provenance(input_path)
        if inferred:
            backend_name = backend_name or inferred[0]
            timestamp = timestamp or inferred[1]
    snapshot = parse_snapshot(input_path.read_bytes(), fmt, backend_name, timestamp)
    return store_snapshot(store_path, snapshot)


@click.command("ingest")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--format", "fmt", type=click.Choice([f.value for f in SnapshotFormat]), default=None, help="Input format."
)
@click.option("--backend", "backend_name", default=None, help="Backend name (CSV input).")
@click.option("--timestamp", default=None, help="Calibration instant, YYYY-MM-DDThh:mm:ssZ (CSV input).")
@click.pass_obj
def ingest(state: CliState, input_path: Path, fmt: str | None, backend_name: str | None, timestamp: str | None):
    """Parse a calibration snapshot and store it under backend@timestamp."""
    with exit_codes():
        key = cmd_ingest(input_path, state.store, fmt, backend_name, timestamp)
    click.echo(str(key))
