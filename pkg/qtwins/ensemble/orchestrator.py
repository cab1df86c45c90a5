"""Parallel training of ensemble members on independent twins.

Each member trains as one independent task. Results are collected by member
index after a full barrier, so the ensemble is identical for any worker count.
"""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from calibration import CalibrationSnapshot
from config import settings
from hybrid import Dataset, DivergenceError, TrainConfig, init_model, train
from twins import QuantumDigitalTwin, TwinSource, replicate_twins, split_seed

from .models import Ensemble, EnsembleTrainingError, MemberResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MemberTask:
    """Everything a worker process needs to train one member."""

    index: int
    twin: QuantumDigitalTwin
    model_seed: int
    dataset: Dataset
    config: TrainConfig


def member_seed(master_seed: int, index: int) -> int:
    """Model initialization seed of member ``index``."""
    return split_seed(split_seed(master_seed, index), 1)


def train_member(task: MemberTask) -> MemberResult:
    """Initialize and train one member. Runs in a worker process."""
    config = task.config.model_copy(update={"seed": task.model_seed})
    model = init_model(task.dataset, config, register_size=task.twin.register_size)
    label = f"member {task.index}"
    try:
        result = train(model, task.dataset, task.twin, config, label=label)
    except DivergenceError as e:
        return MemberResult(
            task.index, task.twin, task.model_seed, error=DivergenceError(e.epoch, e.loss, member=task.index)
        )
    return MemberResult(task.index, task.twin, task.model_seed, model=result.model, loss_trace=result.loss_trace)


def build_tasks(
    snapshot: CalibrationSnapshot,
    n: int,
    dataset: Dataset,
    config: TrainConfig,
    master_seed: int,
    register_size: int = 3,
    identical_twins: bool = False,
) -> list[MemberTask]:
    twins = replicate_twins(snapshot, n, register_size, master_seed, identical=identical_twins)
    return [MemberTask(i, twin, member_seed(master_seed, i), dataset, config) for i, twin in enumerate(twins)]


async def run_tasks(tasks: list[MemberTask], workers: int | None = None) -> list[MemberResult]:
    """Train members on up to ``workers`` processes; serial in-process when 1.

    Returns:
        Results ordered by member index
    """
    workers = min(workers or settings.workers or len(tasks), len(tasks))
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    if workers == 1:
        logger.info(f"Training {len(tasks)} members serially")
        return [train_member(task) for task in tasks]

    logger.info(f"Training {len(tasks)} members on {workers} worker processes")
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [loop.run_in_executor(executor, train_member, task) for task in tasks]
        results = await asyncio.gather(*futures)
    return sorted(results, key=lambda r: r.index)


def assemble(
    results: list[MemberResult],
    snapshot: CalibrationSnapshot,
    dataset: Dataset,
    config: TrainConfig,
    master_seed: int,
    identical_twins: bool = False,
) -> Ensemble:
    """Build the Ensemble, or raise EnsembleTrainingError with every result when a member failed."""
    failed = [r for r in results if not r.ok]
    for r in failed:
        logger.error(f"Member {r.index} (twin seed {r.twin.seed}) failed: {r.error}")
    if failed:
        raise EnsembleTrainingError(results)
    return Ensemble(
        members=[r.to_member() for r in results],
        master_seed=master_seed,
        config=config,
        dataset=dataset,
        source=TwinSource(backend_name=snapshot.backend_name, timestamp=snapshot.timestamp),
        identical_twins=identical_twins,
    )


async def train_ensemble_async(
    snapshot: CalibrationSnapshot,
    n: int,
    dataset: Dataset,
    config: TrainConfig,
    master_seed: int,
    workers: int | None = None,
    register_size: int = 3,
    identical_twins: bool = False,
) -> Ensemble:
    """Replicate ``n`` twins and train one independently initialized model on each.

    Args:
        snapshot: Calibration snapshot the twins are sampled from
        n: Ensemble size (>= 1)
        dataset: Training data shared by all members
        config: Training config shared by all members; its seed is replaced per member
        master_seed: Source of every twin and model seed
        workers: Maximum concurrent members (default: settings.workers, else n)
        register_size: Qubits per twin
        identical_twins: Sample every twin with the same seed

    Raises:
        EnsembleTrainingError: a member diverged; carries all member results
    """
    tasks = build_tasks(snapshot, n, dataset, config, master_seed, register_size, identical_twins)
    results = await run_tasks(tasks, workers)
    return assemble(results, snapshot, dataset, config, master_seed, identical_twins)


def train_ensemble(
    snapshot: CalibrationSnapshot,
    n: int,
    dataset: Dataset,
    config: TrainConfig,
    master_seed: int,
    workers: int | None = None,
    register_size: int = 3,
    identical_twins: bool = False,
) -> Ensemble:
    """Blocking wrapper around :func:`train_ensemble_async`."""
    return asyncio.run(
        train_ensemble_async(snapshot, n, dataset, config, master_seed, workers, register_size, identical_twins)
    )
