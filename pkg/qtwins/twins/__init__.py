"""Quantum digital twins sampled from device calibration data."""

from .factory import TwinSamplingError, rebuild_twin, replicate_twins, sample_twin, split_seed, splitmix64
from .models import MAX_SEED, GateNoise, QuantumDigitalTwin, QubitNoise, TwinSource, TwinSummary

__all__ = [
    "MAX_SEED",
    "GateNoise",
    "QuantumDigitalTwin",
    "QubitNoise",
    "TwinSamplingError",
    "TwinSource",
    "TwinSummary",
    "rebuild_twin",
    "replicate_twins",
    "sample_twin",
    "split_seed",
    "splitmix64",
]
