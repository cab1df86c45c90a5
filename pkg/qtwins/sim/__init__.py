"""Circuit IR and dense density-matrix simulation on quantum digital twins."""

from .circuit import Circuit, CircuitError, Gate, GateKind, build_embedding_circuit, build_variational_layer
from .engine import (
    DensityMatrix,
    DensityMatrixSimulator,
    StateValidationError,
    expectation_z,
    gate_unitary,
    run_density,
)
from .measurement import sample_counts

__all__ = [
    "Circuit",
    "CircuitError",
    "DensityMatrix",
    "DensityMatrixSimulator",
    "Gate",
    "GateKind",
    "StateValidationError",
    "build_embedding_circuit",
    "build_variational_layer",
    "expectation_z",
    "gate_unitary",
    "run_density",
    "sample_counts",
]
