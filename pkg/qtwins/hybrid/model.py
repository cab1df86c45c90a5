"""Hybrid classical-quantum regressor.

x -> x / x_scale -> tanh MLP (1 -> H -> H -> m) -> angles = angle_scale * a
  -> RY(angle_i) RY(theta_i) [CX ring] on the twin -> <Z_i>
  -> linear head -> y_scale * output

In gaussian-nll mode the head has a second output s and the predicted
variance is max(y_scale^2 * exp(s), VARIANCE_FLOOR).

All tensors are float64 on the CPU.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import torch
from config import settings
from torch import nn
from twins import QuantumDigitalTwin

from .dataset import DatasetError
from .models import Dataset, LossMode, TrainConfig
from .quantum import ParameterShift, QuantumLayer

logger = logging.getLogger(__name__)

DTYPE = torch.float64

VARIANCE_FLOOR = 1e-6

# Order of ``HybridModel.named_parameters()``
PARAMETER_NAMES = (
    "thetas",
    "hidden1.weight",
    "hidden1.bias",
    "hidden2.weight",
    "hidden2.bias",
    "to_angles.weight",
    "to_angles.bias",
    "head.weight",
    "head.bias",
)


def configure_torch(threads: int | None = None) -> None:
    """Deterministic kernels on a fixed number of CPU threads."""
    torch.use_deterministic_algorithms(True)
    torch.set_num_threads(threads or settings.torch_threads)


def _rebuild(hyperparameters: dict, arrays: dict[str, np.ndarray]) -> "HybridModel":
    return HybridModel.from_arrays(arrays, **hyperparameters)


class HybridModel(nn.Module):
    """Tanh MLP front end, quantum layer and linear head."""

    def __init__(
        self,
        hidden_width: int,
        register_size: int = 3,
        loss: LossMode | str = LossMode.MSE,
        x_scale: float = 1.0,
        y_scale: float = 1.0,
        angle_scale: float = math.pi,
        entangle: bool = False,
    ):
        super().__init__()
        self.loss = LossMode(loss)
        self.x_scale = float(x_scale)
        self.y_scale = float(y_scale)
        self.angle_scale = float(angle_scale)
        self.entangle = entangle

        self.hidden1 = nn.Linear(1, hidden_width, dtype=DTYPE)
        self.hidden2 = nn.Linear(hidden_width, hidden_width, dtype=DTYPE)
        self.to_angles = nn.Linear(hidden_width, register_size, dtype=DTYPE)
        self.thetas = nn.Parameter(torch.zeros(register_size, dtype=DTYPE))
        self.head = nn.Linear(register_size, self.loss.outputs, dtype=DTYPE)

    @property
    def hidden_width(self) -> int:
        return self.hidden1.out_features

    @property
    def register_size(self) -> int:
        return self.thetas.shape[0]

    def hyperparameters(self) -> dict:
        return {
            "hidden_width": self.hidden_width,
            "register_size": self.register_size,
            "loss": self.loss,
            "x_scale": self.x_scale,
            "y_scale": self.y_scale,
            "angle_scale": self.angle_scale,
            "entangle": self.entangle,
        }

    def parameter_arrays(self) -> dict[str, np.ndarray]:
        """Copies of every parameter as numpy arrays, keyed like ``named_parameters()``."""
        return {name: p.detach().numpy().copy() for name, p in self.named_parameters()}

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray], **hyperparameters) -> "HybridModel":
        """Build a model from parameter arrays; widths are read from the arrays.

        Raises:
            ValueError: missing parameters or inconsistent shapes
        """
        missing = set(PARAMETER_NAMES) - set(arrays)
        if missing:
            raise ValueError(f"missing parameters {sorted(missing)}")
        hyperparameters["hidden_width"] = int(np.shape(arrays["hidden1.weight"])[0])
        hyperparameters["register_size"] = int(np.shape(arrays["thetas"])[0])
        model = cls(**hyperparameters)
        state = {name: torch.tensor(np.asarray(arrays[name], dtype=float), dtype=DTYPE) for name in PARAMETER_NAMES}
        try:
            model.load_state_dict(state)
        except RuntimeError as e:
            raise ValueError(f"parameter shapes do not fit the model: {e}")
        return model

    def with_arrays(self, overrides: dict[str, np.ndarray] | None = None) -> "HybridModel":
        """Independent copy, with some parameter arrays replaced."""
        return HybridModel.from_arrays({**self.parameter_arrays(), **(overrides or {})}, **self.hyperparameters())

    def is_finite(self) -> bool:
        return all(bool(torch.isfinite(p).all()) for p in self.parameters())

    def __reduce__(self):
        # Crosses process pools as numpy arrays, never as shared-memory tensors
        return _rebuild, (self.hyperparameters(), self.parameter_arrays())

    def angles(self, xs: torch.Tensor) -> torch.Tensor:
        """Embedding angles for a batch of inputs, shape (B, m)."""
        h = torch.tanh(self.hidden1((xs / self.x_scale).unsqueeze(1)))
        h = torch.tanh(self.hidden2(h))
        return self.angle_scale * torch.tanh(self.to_angles(h))

    def forward(self, xs: torch.Tensor, layer: QuantumLayer) -> tuple[torch.Tensor, torch.Tensor | None]:
        """Predicted means and, in gaussian-nll mode, floored variances, in target units."""
        z = ParameterShift.apply(self.angles(xs), self.thetas, layer)
        out = self.head(z)
        mean = self.y_scale * out[:, 0]
        if self.loss is not LossMode.GAUSSIAN_NLL:
            return mean, None
        return mean, torch.clamp(self.y_scale**2 * torch.exp(out[:, 1]), min=VARIANCE_FLOOR)


def init_model(dataset: Dataset, config: TrainConfig, register_size: int = 3) -> HybridModel:
    """Seeded initialization: dense layers uniform in +-1/sqrt(fan_in), thetas uniform in [-pi, pi]."""
    generator = torch.Generator().manual_seed(config.seed)
    model = HybridModel(
        config.hidden_width,
        register_size,
        loss=config.loss,
        x_scale=dataset.x_scale,
        y_scale=dataset.y_scale,
        angle_scale=config.angle_scale,
        entangle=config.entangle,
    )
    with torch.no_grad():
        for linear in (model.hidden1, model.hidden2, model.to_angles, model.head):
            bound = 1.0 / math.sqrt(linear.in_features)
            linear.weight.uniform_(-bound, bound, generator=generator)
            linear.bias.uniform_(-bound, bound, generator=generator)
        model.thetas.uniform_(-math.pi, math.pi, generator=generator)
    return model


def check_inputs(xs) -> torch.Tensor:
    """Batch of finite inputs as a float64 tensor."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if not np.all(np.isfinite(xs)):
        raise DatasetError("model inputs must be finite")
    return torch.tensor(xs, dtype=DTYPE)


@dataclass(frozen=True)
class Prediction:
    mean: float
    variance: float | None = None


def predict(
    model: HybridModel, xs, twin: QuantumDigitalTwin | None = None, layer: QuantumLayer | None = None
) -> tuple[np.ndarray, np.ndarray | None]:
    """Vectorized predictions: (means, variances or None)."""
    inputs = check_inputs(xs)
    layer = layer or QuantumLayer(model.register_size, twin, entangle=model.entangle)
    configure_torch()
    with torch.no_grad():
        mean, variance = model(inputs, layer)
    return mean.numpy(), None if variance is None else variance.numpy()


def forward(model: HybridModel, x: float, twin: QuantumDigitalTwin | None = None) -> Prediction:
    """Predict one input, on the twin or noiselessly when ``twin`` is None."""
    mean, variance = predict(model, [x], twin)
    return Prediction(mean=float(mean[0]), variance=None if variance is None else float(variance[0]))
