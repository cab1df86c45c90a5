"""Configuration and data models for hybrid training."""

import math
from enum import StrEnum

from pydantic import BaseModel, Field, model_validator


class LossMode(StrEnum):
    """Training objective."""

    MSE = "mse"
    GAUSSIAN_NLL = "gaussian-nll"

    @property
    def outputs(self) -> int:
        """Head width: mean only, or (mean, log variance)."""
        return 2 if self is LossMode.GAUSSIAN_NLL else 1


class TrainConfig(BaseModel):
    """Hyperparameters of one hybrid model's training run."""

    epochs: int = Field(default=300, ge=1)
    learning_rate: float = Field(default=0.01, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    loss: LossMode = LossMode.MSE
    seed: int = Field(default=0, ge=0, le=2**64 - 1)  # Model initialization seed
    hidden_width: int = Field(default=100, ge=1)
    angle_scale: float = Field(default=math.pi, gt=0)
    entangle: bool = False  # CX ring after the RY rotations
    log_every: int = Field(default=50, ge=1)

    class Config:
        frozen = True


class Dataset(BaseModel):
    """1-D regression data with normalization scales."""

    x: list[float]
    y: list[float]
    x_scale: float = Field(gt=0)
    y_scale: float = Field(gt=0)
    noise_sigma: float | None = None
    domain: tuple[float, float] | None = None
    seed: int | None = None
    true_function: str = "cubic"

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _check_lengths(self) -> "Dataset":
        if not self.x:
            raise ValueError("dataset needs at least one point")
        if len(self.x) != len(self.y):
            raise ValueError(f"x and y lengths differ: {len(self.x)} != {len(self.y)}")
        return self
