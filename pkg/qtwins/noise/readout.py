"""Readout confusion matrices."""

from dataclasses import dataclass

import numpy as np

from .channels import ChannelError


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Column-stochastic readout matrix, ``p[reported][prepared]``."""

    p: np.ndarray

    def __post_init__(self):
        self.p.setflags(write=False)

    @property
    def prob_meas1_prep0(self) -> float:
        return float(self.p[1, 0])

    @property
    def prob_meas0_prep1(self) -> float:
        return float(self.p[0, 1])

    @property
    def is_identity(self) -> bool:
        return self.prob_meas1_prep0 == 0.0 and self.prob_meas0_prep1 == 0.0


def readout_confusion(prob_meas1_prep0: float, prob_meas0_prep1: float) -> ConfusionMatrix:
    """Build the confusion matrix from the two flip probabilities.

    Args:
        prob_meas1_prep0: P(report 1 | prepared 0)
        prob_meas0_prep1: P(report 0 | prepared 1)

    Returns:
        [[1 - p10, p01], [p10, 1 - p01]]
    """
    for name, value in (("prob_meas1_prep0", prob_meas1_prep0), ("prob_meas0_prep1", prob_meas0_prep1)):
        if not (0.0 <= value <= 1.0):
            raise ChannelError(f"{name} must be in [0, 1], got {value}")
    p = np.array(
        [
            [1.0 - prob_meas1_prep0, prob_meas0_prep1],
            [prob_meas1_prep0, 1.0 - prob_meas0_prep1],
        ]
    )
    return ConfusionMatrix(p=p)
