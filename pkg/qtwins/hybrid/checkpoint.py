"""JSON checkpoints of trained hybrid models."""

import json
import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel
from twins import QuantumDigitalTwin, TwinSource

from .model import HybridModel
from .models import LossMode, TrainConfig

logger = logging.getLogger(__name__)


class ModelCheckpoint(BaseModel):
    """Serialized parameters, training config and twin of one model."""

    parameters: dict[str, list]
    x_scale: float
    y_scale: float
    angle_scale: float
    loss: LossMode
    entangle: bool
    config: TrainConfig
    twin_source: TwinSource | None = None
    twin: QuantumDigitalTwin | None = None
    loss_trace: list[float] = []

    @classmethod
    def from_model(
        cls,
        model: HybridModel,
        config: TrainConfig,
        twin: QuantumDigitalTwin | None = None,
        loss_trace: list[float] | None = None,
    ) -> "ModelCheckpoint":
        return cls(
            parameters={name: value.tolist() for name, value in model.parameter_arrays().items()},
            x_scale=model.x_scale,
            y_scale=model.y_scale,
            angle_scale=model.angle_scale,
            loss=model.loss,
            entangle=model.entangle,
            config=config,
            twin_source=twin.source if twin is not None else None,
            twin=twin,
            loss_trace=list(loss_trace or []),
        )

    def to_model(self) -> HybridModel:
        """Rebuild the model bit-exactly.

        Raises:
            ValueError: missing parameters or shapes that do not fit together
        """
        return HybridModel.from_arrays(
            {name: np.array(value, dtype=float) for name, value in self.parameters.items()},
            x_scale=self.x_scale,
            y_scale=self.y_scale,
            angle_scale=self.angle_scale,
            loss=self.loss,
            entangle=self.entangle,
        )

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2) + "\n"


def save_checkpoint(
    path: Path,
    model: HybridModel,
    config: TrainConfig,
    twin: QuantumDigitalTwin | None = None,
    loss_trace: list[float] | None = None,
) -> Path:
    path = Path(path)
    path.write_text(ModelCheckpoint.from_model(model, config, twin, loss_trace).to_json())
    logger.debug(f"Saved checkpoint {path}")
    return path


def load_checkpoint(path: Path) -> ModelCheckpoint:
    """Read a checkpoint; ``.to_model()`` rebuilds the model bit-exactly."""
    return ModelCheckpoint.model_validate_json(Path(path).read_text())
