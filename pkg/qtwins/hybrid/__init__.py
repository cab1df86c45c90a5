"""Hybrid classical-quantum regression: dataset, model, gradients, training."""

from .checkpoint import ModelCheckpoint, load_checkpoint, save_checkpoint
from .dataset import DatasetError, dataset_to_csv, generate_dataset, load_dataset, save_dataset, true_function
from .gradients import batch_loss, loss_and_gradients
from .model import (
    DTYPE,
    PARAMETER_NAMES,
    VARIANCE_FLOOR,
    HybridModel,
    Prediction,
    configure_torch,
    forward,
    init_model,
    predict,
)
from .models import Dataset, LossMode, TrainConfig
from .quantum import ParameterShift, QuantumJacobian, QuantumLayer, layer_jacobian, quantum_gradient, shift_jacobian
from .training import DivergenceError, TrainResult, make_optimizer, train

__all__ = [
    "DTYPE",
    "PARAMETER_NAMES",
    "VARIANCE_FLOOR",
    "Dataset",
    "DatasetError",
    "DivergenceError",
    "HybridModel",
    "LossMode",
    "ModelCheckpoint",
    "ParameterShift",
    "Prediction",
    "QuantumJacobian",
    "QuantumLayer",
    "TrainConfig",
    "TrainResult",
    "batch_loss",
    "configure_torch",
    "dataset_to_csv",
    "forward",
    "generate_dataset",
    "init_model",
    "layer_jacobian",
    "load_checkpoint",
    "load_dataset",
    "loss_and_gradients",
    "make_optimizer",
    "predict",
    "quantum_gradient",
    "save_checkpoint",
    "save_dataset",
    "shift_jacobian",
    "train",
    "true_function",
]
