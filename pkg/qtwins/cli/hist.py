"""``qtwins hist``: empirical distribution of one calibration property."""

from pathlib import Path

import rich_click as click
from calibration import Histogram, HistogramProperty, empirical_histogram

from .app import CliState, exit_codes, resolve_snapshot


def cmd_hist(store_path: Path, key_text: str, prop: HistogramProperty | str, bins: int, output: Path) -> Histogram:
    snapshot = resolve_snapshot(store_path, key_text)
    histogram = empirical_histogram(snapshot, prop, bins)
    Path(output).write_text(histogram.to_csv())
    return histogram


@click.command("hist")
@click.argument("key")
@click.option(
    "--property",
    "prop",
    type=click.Choice([p.value for p in HistogramProperty]),
    default=HistogramProperty.T1.value,
    show_default=True,
)
@click.option("--bins", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), required=True, help="CSV to write.")
@click.pass_obj
def hist(state: CliState, key: str, prop: str, bins: int, output: Path):
    """Write a bin_lo,bin_hi,count histogram of KEY (backend@timestamp or backend) and print summary stats."""
    with exit_codes():
        histogram = cmd_hist(state.store, key, prop, bins, output)
    click.echo(histogram.summary.line())
