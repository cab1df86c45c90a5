"""Ensemble checkpoints: one model checkpoint per member plus a manifest."""

import json
import logging
from pathlib import Path

from calibration import CalibrationSnapshot
from hybrid import Dataset, ModelCheckpoint, TrainConfig, load_checkpoint, save_checkpoint
from pydantic import BaseModel
from twins import TwinSource, rebuild_twin

from .models import Ensemble, EnsembleMember

logger = logging.getLogger(__name__)

MANIFEST_NAME = "ensemble.json"


class EnsembleManifest(BaseModel):
    master_seed: int
    size: int
    source: TwinSource
    identical_twins: bool = False
    config: TrainConfig
    dataset: Dataset
    member_seeds: list[int]
    twin_seeds: list[int]
    final_losses: list[float | None]


def member_path(directory: Path, index: int) -> Path:
    return Path(directory) / f"member_{index}.json"


def save_ensemble(ensemble: Ensemble, directory: Path) -> Path:
    """Write ``member_<i>.json`` checkpoints and ``ensemble.json`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for member in ensemble.members:
        config = ensemble.config.model_copy(update={"seed": member.model_seed})
        save_checkpoint(member_path(directory, member.index), member.model, config, member.twin, member.loss_trace)

    manifest = EnsembleManifest(
        master_seed=ensemble.master_seed,
        size=ensemble.size,
        source=ensemble.source,
        identical_twins=ensemble.identical_twins,
        config=ensemble.config,
        dataset=ensemble.dataset,
        member_seeds=[m.model_seed for m in ensemble.members],
        twin_seeds=[m.twin.seed for m in ensemble.members],
        final_losses=[m.final_loss for m in ensemble.members],
    )
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest.model_dump(mode="json"), indent=2) + "\n")
    logger.info(f"Saved {ensemble.size}-member ensemble to {directory}")
    return path


def load_ensemble(directory: Path, snapshot: CalibrationSnapshot | None = None) -> Ensemble:
    """Rebuild an ensemble saved by :func:`save_ensemble`.

    When ``snapshot`` is given, every stored twin must re-sample identically
    from it.

    Raises:
        ValueError: a member checkpoint lacks its twin, or a twin does not
            match its re-sampled provenance
    """
    directory = Path(directory)
    manifest = EnsembleManifest.model_validate_json((directory / MANIFEST_NAME).read_text())
    members = []
    for i in range(manifest.size):
        checkpoint: ModelCheckpoint = load_checkpoint(member_path(directory, i))
        if checkpoint.twin is None:
            raise ValueError(f"member {i} checkpoint has no twin")
        if snapshot is not None and rebuild_twin(snapshot, checkpoint.twin) != checkpoint.twin:
            raise ValueError(f"member {i} twin (seed {checkpoint.twin.seed}) does not re-sample from {snapshot.key}")
        members.append(
            EnsembleMember(
                index=i,
                model=checkpoint.to_model(),
                twin=checkpoint.twin,
                model_seed=manifest.member_seeds[i],
                loss_trace=checkpoint.loss_trace,
            )
        )
    return Ensemble(
        members=members,
        master_seed=manifest.master_seed,
        config=manifest.config,
        dataset=manifest.dataset,
        source=manifest.source,
        identical_twins=manifest.identical_twins,
    )
