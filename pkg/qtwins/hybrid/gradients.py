"""Full-batch loss and exact gradients.

Autograd backpropagates through the classical layers and hands the quantum
layer's output gradient to the parameter-shift Jacobians.
"""

import logging

import numpy as np
import torch
import torch.nn.functional as F
from twins import QuantumDigitalTwin

from .dataset import DatasetError
from .model import DTYPE, VARIANCE_FLOOR, HybridModel, check_inputs
from .models import LossMode
from .quantum import QuantumLayer

logger = logging.getLogger(__name__)


def batch_loss(model: HybridModel, xs: torch.Tensor, ys: torch.Tensor, layer: QuantumLayer) -> torch.Tensor:
    """mse, or the gaussian NLL mean of [log var + (y - mu)^2 / var] / 2, in target units."""
    mean, variance = model(xs, layer)
    if model.loss is LossMode.MSE:
        return F.mse_loss(mean, ys)
    return F.gaussian_nll_loss(mean, ys, variance, eps=VARIANCE_FLOOR)


def loss_and_gradients(
    model: HybridModel,
    xs,
    ys,
    twin: QuantumDigitalTwin | None = None,
    loss: LossMode | None = None,
    layer: QuantumLayer | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Full-batch loss and its gradient with respect to every parameter.

    Args:
        model: Model to differentiate; its ``.grad`` fields are left cleared
        xs: Batch inputs
        ys: Batch targets in original units
        twin: Twin for the quantum layer; noiseless when None
        loss: Loss mode; must match the model's head when given
        layer: Reusable quantum layer (built from ``twin`` when omitted)

    Returns:
        (loss, gradients keyed like ``model.named_parameters()``)
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if xs.size == 0:
        raise DatasetError("empty batch")
    if xs.shape != ys.shape:
        raise DatasetError(f"batch inputs and targets differ in shape: {xs.shape} != {ys.shape}")
    loss = model.loss if loss is None else LossMode(loss)
    if loss is not model.loss:
        raise ValueError(f"model head is built for {model.loss}, not {loss}")

    layer = layer or QuantumLayer(model.register_size, twin, entangle=model.entangle)
    model.zero_grad(set_to_none=True)
    value = batch_loss(model, check_inputs(xs), torch.tensor(ys, dtype=DTYPE), layer)
    value.backward()
    grads = {name: p.grad.detach().numpy().copy() for name, p in model.named_parameters()}
    model.zero_grad(set_to_none=True)
    return value.item(), grads
