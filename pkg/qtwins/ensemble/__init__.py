"""Deep ensembles of hybrid models trained on parallel quantum digital twins."""

from .aggregate import UQReportError, aggregate_band, noise_impact, predict_band, uq_report
from .checkpoint import EnsembleManifest, load_ensemble, save_ensemble
from .models import (
    Ensemble,
    EnsembleMember,
    EnsembleTrainingError,
    MemberNoiseImpact,
    MemberResult,
    NoiseImpactReport,
    PredictionBand,
    UQReport,
)
from .orchestrator import (
    MemberTask,
    assemble,
    build_tasks,
    member_seed,
    run_tasks,
    train_ensemble,
    train_ensemble_async,
    train_member,
)

__all__ = [
    "Ensemble",
    "EnsembleManifest",
    "EnsembleMember",
    "EnsembleTrainingError",
    "MemberNoiseImpact",
    "MemberResult",
    "MemberTask",
    "NoiseImpactReport",
    "PredictionBand",
    "UQReport",
    "UQReportError",
    "aggregate_band",
    "assemble",
    "build_tasks",
    "load_ensemble",
    "member_seed",
    "noise_impact",
    "predict_band",
    "run_tasks",
    "save_ensemble",
    "train_ensemble",
    "train_ensemble_async",
    "train_member",
    "uq_report",
]
