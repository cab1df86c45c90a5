"""Noise channels built from calibration parameters.

Supports:
- Thermal relaxation (T1/T2 over a gate duration)
- Depolarizing noise from average gate infidelity
- Readout confusion
"""

from .channels import (
    ChannelError,
    CptpReport,
    KrausChannel,
    clamp_t2,
    compose,
    depolarizing_channel,
    depolarizing_strength,
    identity_channel,
    tensor,
    thermal_relaxation_channel,
    validate_cptp,
)
from .readout import ConfusionMatrix, readout_confusion

__all__ = [
    "ChannelError",
    "ConfusionMatrix",
    "CptpReport",
    "KrausChannel",
    "clamp_t2",
    "compose",
    "depolarizing_channel",
    "depolarizing_strength",
    "identity_channel",
    "readout_confusion",
    "tensor",
    "thermal_relaxation_channel",
    "validate_cptp",
]
