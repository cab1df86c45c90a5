from pathlib import Path
from typing import Literal

import numpy as np
from calibration import SnapshotKey, TimestampSelector
from config import APP_VERSION, settings
from ensemble import UQReport
from hybrid import Dataset, TrainConfig
from pydantic import BaseModel, Field, model_validator
from twins import MAX_SEED, TwinSource

# ============ Experiment Models ============


class SnapshotSelector(BaseModel):
    """Which calibration snapshot to sample twins from.

    ``path`` reads a snapshot file directly; otherwise the snapshot is looked
    up in the store by backend and timestamp (newest when timestamp is None).
    """

    backend: str | None = None
    timestamp: str | None = None
    rule: TimestampSelector = TimestampSelector.LATEST_BEFORE
    path: Path | None = None

    @model_validator(mode="after")
    def _check_source(self) -> "SnapshotSelector":
        if self.path is None and not self.backend:
            raise ValueError("snapshot needs either a backend name or a file path")
        return self


class DatasetConfig(BaseModel):
    n_points: int = Field(default=20, ge=1)
    domain: tuple[float, float] = (-4.0, 4.0)
    noise_sigma: float = Field(default=3.0, ge=0)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)

    @model_validator(mode="after")
    def _check_domain(self) -> "DatasetConfig":
        if not self.domain[0] < self.domain[1]:
            raise ValueError(f"invalid domain {list(self.domain)}")
        return self


class GridConfig(BaseModel):
    start: float = -6.0
    stop: float = 6.0
    points: int = Field(default=121, ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "GridConfig":
        if self.points > 1 and not self.start < self.stop:
            raise ValueError(f"grid start {self.start} must be below stop {self.stop}")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


class ExperimentConfig(BaseModel):
    """One ensemble experiment: snapshot, twins, data, training and evaluation grid."""

    snapshot: SnapshotSelector
    n_twins: int = Field(default=5, ge=1)
    register_size: int = Field(default=3, ge=1)
    identical_twins: bool = False
    dataset: DatasetConfig = DatasetConfig()
    train: TrainConfig = TrainConfig()
    grid: GridConfig = GridConfig()
    output_dir: Path = Path("runs/latest")
    master_seed: int = Field(default=0, ge=0, le=MAX_SEED)

    @model_validator(mode="after")
    def _check_register(self) -> "ExperimentConfig":
        if self.register_size > settings.max_register_size:
            raise ValueError(f"register_size {self.register_size} exceeds the cap {settings.max_register_size}")
        return self


# ============ Run Manifest Models ============


class MemberOutcome(BaseModel):
    member: int
    twin_seed: int
    model_seed: int
    final_loss: float | None = None
    diverged_epoch: int | None = None
    diverged_loss: float | None = None


class RunManifest(BaseModel):
    """Everything needed to reproduce a run, plus its headline results."""

    version: str = APP_VERSION
    status: Literal["complete", "diverged"]
    config: ExperimentConfig
    snapshot: TwinSource
    dataset: Dataset
    members: list[MemberOutcome]
    uq: UQReport | None = None
    mean_noise_shift: float | None = None

    @property
    def snapshot_key(self) -> SnapshotKey:
        return SnapshotKey(backend_name=self.snapshot.backend_name, timestamp=self.snapshot.timestamp)
