"""Full-batch Adam training of one hybrid model on one twin."""

import logging
import math
from dataclasses import dataclass, field

import torch
from twins import QuantumDigitalTwin

from .gradients import batch_loss
from .model import DTYPE, HybridModel, check_inputs, configure_torch
from .models import Dataset, TrainConfig
from .quantum import QuantumLayer

logger = logging.getLogger(__name__)


class DivergenceError(ArithmeticError):
    """Training produced a non-finite loss, activation or parameter.

    ``loss`` is None when the loss was still finite and the parameters or
    activations overflowed.
    """

    def __init__(self, epoch: int, loss: float | None = None, member: int | None = None):
        super().__init__(epoch, loss, member)
        self.epoch = epoch
        self.loss = loss
        self.member = member

    def __str__(self) -> str:
        where = f"member {self.member}, " if self.member is not None else ""
        what = "non-finite parameters" if self.loss is None else f"loss={self.loss}"
        return f"training diverged ({where}epoch {self.epoch}): {what}"


@dataclass
class TrainResult:
    model: HybridModel
    loss_trace: list[float] = field(default_factory=list)


def make_optimizer(model: HybridModel, config: TrainConfig) -> torch.optim.Adam:
    return torch.optim.Adam(
        model.parameters(),
        lr=config.learning_rate,
        betas=(config.beta1, config.beta2),
        eps=config.eps,
    )


def train(
    model: HybridModel,
    dataset: Dataset,
    twin: QuantumDigitalTwin | None,
    config: TrainConfig,
    label: str = "model",
) -> TrainResult:
    """Train for ``config.epochs`` full-batch Adam steps.

    The loss recorded for an epoch is the loss before that epoch's update.
    The input model is not modified.

    Raises:
        DivergenceError: On the first non-finite loss, or parameters that
            overflow after an update
    """
    configure_torch()
    xs = check_inputs(dataset.x)
    ys = torch.tensor(dataset.y, dtype=DTYPE)
    layer = QuantumLayer(model.register_size, twin, entangle=model.entangle)
    current = model.with_arrays()
    optimizer = make_optimizer(current, config)
    trace: list[float] = []

    logger.debug(f"Training {label}: {config.epochs} epochs, lr={config.learning_rate}, loss={config.loss}")
    for epoch in range(config.epochs):
        optimizer.zero_grad()
        try:
            loss = batch_loss(current, xs, ys, layer)
        except FloatingPointError as e:
            logger.error(f"{label} diverged at epoch {epoch}: {e}")
            raise DivergenceError(epoch)
        value = loss.item()
        if not math.isfinite(value):
            logger.error(f"{label} diverged at epoch {epoch}: loss={value}")
            raise DivergenceError(epoch, value)
        trace.append(value)
        if epoch % config.log_every == 0:
            logger.debug(f"{label} epoch {epoch}: loss={value:.6g}")

        loss.backward()
        optimizer.step()
        if not current.is_finite():
            logger.error(f"{label} diverged at epoch {epoch}: non-finite parameters after the update")
            raise DivergenceError(epoch)

    logger.info(f"Trained {label}: loss {trace[0]:.6g} -> {trace[-1]:.6g}")
    return TrainResult(model=current, loss_trace=trace)
