"""Ensemble data types."""

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from hybrid import Dataset, DivergenceError, HybridModel, TrainConfig
from pydantic import BaseModel
from twins import QuantumDigitalTwin, TwinSource


@dataclass
class EnsembleMember:
    """One trained model and the twin it was trained on."""

    index: int
    model: HybridModel
    twin: QuantumDigitalTwin
    model_seed: int
    loss_trace: list[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float | None:
        return self.loss_trace[-1] if self.loss_trace else None


@dataclass
class MemberResult:
    """Outcome of one member's training task; ``error`` is set when it diverged."""

    index: int
    twin: QuantumDigitalTwin
    model_seed: int
    model: HybridModel | None = None
    loss_trace: list[float] = field(default_factory=list)
    error: DivergenceError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_member(self) -> EnsembleMember:
        return EnsembleMember(self.index, self.model, self.twin, self.model_seed, self.loss_trace)


@dataclass
class Ensemble:
    """N hybrid models, each trained on its own twin of one snapshot."""

    members: list[EnsembleMember]
    master_seed: int
    config: TrainConfig
    dataset: Dataset
    source: TwinSource
    identical_twins: bool = False

    def __post_init__(self):
        if not self.members:
            raise ValueError("an ensemble needs at least one member")
        seeds = [m.model_seed for m in self.members]
        if len(set(seeds)) != len(seeds):
            raise ValueError(f"member model seeds must be distinct, got {seeds}")
        sizes = {m.twin.register_size for m in self.members} | {m.model.register_size for m in self.members}
        if len(sizes) != 1:
            raise ValueError(f"members disagree on register size: {sorted(sizes)}")
        if [m.index for m in self.members] != list(range(len(self.members))):
            raise ValueError("members must be ordered by index 0..N-1")

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def register_size(self) -> int:
        return self.members[0].twin.register_size


class EnsembleTrainingError(RuntimeError):
    """One or more members diverged; ``results`` holds every member's outcome by index."""

    def __init__(self, results: list[MemberResult]):
        self.results = results
        self.failures = [r.error for r in results if r.error is not None]
        detail = "; ".join(str(e) for e in self.failures)
        super().__init__(f"{len(self.failures)} of {len(results)} ensemble members failed: {detail}")


@dataclass(eq=False)
class PredictionBand:
    """Aggregated ensemble predictions on a grid.

    ``members`` is N x |grid|. ``member_variances`` is present for
    gaussian-nll ensembles.
    """

    grid: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    members: np.ndarray
    member_variances: np.ndarray | None = None

    def __post_init__(self):
        g = len(self.grid)
        if self.mean.shape != (g,) or self.std.shape != (g,) or self.members.shape[1:] != (g,):
            raise ValueError("band arrays must all match the grid length")
        if np.any(self.std < 0):
            raise ValueError("band std must be non-negative")

    def to_csv(self, true_values: np.ndarray | None = None, include_members: bool = True) -> str:
        """CSV ``x[,true],mean,std[,member_0..member_{N-1}]``, floats written with repr."""
        header = ["x"]
        if true_values is not None:
            header.append("true")
        header += ["mean", "std"]
        if include_members:
            header += [f"member_{i}" for i in range(len(self.members))]

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for j, x in enumerate(self.grid):
            row = [repr(float(x))]
            if true_values is not None:
                row.append(repr(float(true_values[j])))
            row += [repr(float(self.mean[j])), repr(float(self.std[j]))]
            if include_members:
                row += [repr(float(v)) for v in self.members[:, j]]
            writer.writerow(row)
        return buf.getvalue()


class UQReport(BaseModel):
    """Fit quality and uncertainty inside versus outside the training domain."""

    in_distribution_rmse: float
    mean_in_domain_std: float
    mean_out_of_domain_std: float
    in_domain_points: int
    out_of_domain_points: int

    @property
    def std_ratio(self) -> float:
        if self.mean_in_domain_std == 0:
            return float("inf") if self.mean_out_of_domain_std > 0 else 1.0
        return self.mean_out_of_domain_std / self.mean_in_domain_std


class MemberNoiseImpact(BaseModel):
    """Prediction shift caused by one member's twin noise."""

    member: int
    twin_seed: int
    rms_shift: float
    max_shift: float
    mean_t1_us: float
    mean_t2_us: float
    two_qubit_error: float


class NoiseImpactReport(BaseModel):
    members: list[MemberNoiseImpact]

    @property
    def mean_rms_shift(self) -> float:
        return float(np.mean([m.rms_shift for m in self.members]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        fields = list(MemberNoiseImpact.model_fields)
        writer.writerow(fields)
        for m in self.members:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(m, f) for f in fields)])
        return buf.getvalue()
