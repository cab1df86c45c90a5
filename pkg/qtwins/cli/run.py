"""``qtwins run``: the full ensemble experiment.

Writes band.csv, train.csv, noise_impact.csv, manifest.json and the trained
ensemble checkpoint into the configured output directory.
"""

import asyncio
import json
import logging
from pathlib import Path

import rich_click as click
from calibration import (
    CalibrationSnapshot,
    SnapshotFormat,
    SnapshotKey,
    SnapshotStore,
    TimestampSelector,
    format_timestamp,
    parse_snapshot,
)
from ensemble import (
    EnsembleTrainingError,
    UQReportError,
    assemble,
    build_tasks,
    noise_impact,
    predict_band,
    run_tasks,
    save_ensemble,
    uq_report,
)
from hybrid import dataset_to_csv, generate_dataset, true_function
from models import ExperimentConfig, MemberOutcome, RunManifest, SnapshotSelector
from twins import TwinSource

from .app import CliState, exit_codes

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def pin_snapshot(selector: SnapshotSelector, key: SnapshotKey) -> SnapshotSelector:
    """Selector that resolves to exactly ``key`` in the store, whatever is ingested later."""
    if selector.path is not None:
        return selector
    return SnapshotSelector(
        backend=key.backend_name,
        timestamp=format_timestamp(key.timestamp),
        rule=TimestampSelector.EXACT,
    )


def load_experiment_config(path: Path) -> ExperimentConfig:
    """Read an ExperimentConfig, or the config embedded in a previous run's manifest.

    A manifest's config is pinned to the snapshot that run resolved.
    """
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "status" in data and "config" in data:
        manifest = RunManifest.model_validate(data)
        pinned = pin_snapshot(manifest.config.snapshot, manifest.snapshot_key)
        return manifest.config.model_copy(update={"snapshot": pinned})
    return ExperimentConfig.model_validate(data)


def select_snapshot(selector: SnapshotSelector, store_path: Path) -> CalibrationSnapshot:
    if selector.path is not None:
        path = Path(selector.path)
        fmt = SnapshotFormat.CALIBRATION_CSV if path.suffix.lower() == ".csv" else SnapshotFormat.CANONICAL_JSON
        return parse_snapshot(path.read_bytes(), fmt, selector.backend, selector.timestamp)
    store = SnapshotStore(store_path)
    if selector.timestamp is None:
        timestamps = store.timestamps(selector.backend)
        if not timestamps:
            raise LookupError(f"no {selector.backend} snapshots in {store_path}")
        return store.load(selector.backend, timestamps[-1])
    return store.load(selector.backend, selector.timestamp, selector.rule)


def _write_manifest(output_dir: Path, manifest: RunManifest) -> Path:
    path = output_dir / MANIFEST_NAME
    path.write_text(json.dumps(manifest.model_dump(mode="json"), indent=2) + "\n")
    return path


def cmd_run(config: ExperimentConfig, store_path: Path, workers: int | None = None) -> RunManifest:
    """Run the experiment described by ``config`` and write its artifacts.

    Raises:
        EnsembleTrainingError: a member diverged; the manifest records the partial state
    """
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    snapshot = select_snapshot(config.snapshot, store_path)
    config = config.model_copy(update={"snapshot": pin_snapshot(config.snapshot, snapshot.key)})
    ds = config.dataset
    dataset = generate_dataset(ds.n_points, ds.domain, ds.noise_sigma, ds.seed)
    (output_dir / "train.csv").write_text(dataset_to_csv(dataset))

    tasks = build_tasks(
        snapshot,
        config.n_twins,
        dataset,
        config.train,
        config.master_seed,
        config.register_size,
        config.identical_twins,
    )
    results = asyncio.run(run_tasks(tasks, workers))
    source = TwinSource(backend_name=snapshot.backend_name, timestamp=snapshot.timestamp)
    outcomes = [
        MemberOutcome(
            member=r.index,
            twin_seed=r.twin.seed,
            model_seed=r.model_seed,
            final_loss=r.loss_trace[-1] if r.loss_trace else None,
            diverged_epoch=r.error.epoch if r.error else None,
            diverged_loss=r.error.loss if r.error else None,
        )
        for r in results
    ]

    manifest = RunManifest(status="diverged", config=config, snapshot=source, dataset=dataset, members=outcomes)
    try:
        ensemble = assemble(results, snapshot, dataset, config.train, config.master_seed, config.identical_twins)
    except EnsembleTrainingError:
        _write_manifest(output_dir, manifest)
        raise

    grid = config.grid.values()
    band = predict_band(ensemble, grid)
    (output_dir / "band.csv").write_text(band.to_csv(true_values=true_function(dataset, grid)))

    impact = noise_impact(ensemble, grid)
    (output_dir / "noise_impact.csv").write_text(impact.to_csv())
    save_ensemble(ensemble, output_dir / "ensemble")

    try:
        report = uq_report(band, dataset)
    except UQReportError as e:
        logger.warning(f"No UQ report: {e}")
        report = None

    manifest = manifest.model_copy(
        update={"status": "complete", "uq": report, "mean_noise_shift": impact.mean_rms_shift}
    )
    _write_manifest(output_dir, manifest)
    logger.info(f"Run complete: {config.n_twins} members, artifacts in {output_dir}")
    return manifest


@click.command("run")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-o", "--output", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output directory.")
@click.pass_obj
def run(state: CliState, config_path: Path, output: Path | None):
    """Train the ensemble described by CONFIG_PATH (an experiment config or a previous manifest.json)."""
    with exit_codes():
        config = load_experiment_config(config_path)
        update = {}
        if output is not None:
            update["output_dir"] = output
        if state.seed is not None:
            update["master_seed"] = state.seed
        if update:
            config = ExperimentConfig.model_validate({**config.model_dump(), **update})
        manifest = cmd_run(config, state.store, state.workers)

    if manifest.uq is not None:
        uq = manifest.uq
        click.echo(
            f"rmse={uq.in_distribution_rmse:.4f} in_std={uq.mean_in_domain_std:.4f} "
            f"out_std={uq.mean_out_of_domain_std:.4f}"
        )
    click.echo(str(Path(config.output_dir) / MANIFEST_NAME))
