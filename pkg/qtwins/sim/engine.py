"""Dense density-matrix simulation with twin noise.

Qubit 0 is the most significant bit of basis indices. Every gate is
followed, when a twin is attached, by thermal relaxation over the gate
duration on each participating qubit and then depolarizing noise of the
gate's calibrated error. No noise is inserted for idle periods.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
from config import settings
from noise import KrausChannel, compose, depolarizing_channel, tensor, thermal_relaxation_channel
from twins import GateNoise, QuantumDigitalTwin

from .circuit import Circuit, CircuitError, Gate, GateKind

logger = logging.getLogger(__name__)

# Simulator gate kind -> calibration gate names tried in order
CALIBRATION_NAMES = {
    GateKind.RY: ("sx", "x"),
    GateKind.RZ: ("rz",),
    GateKind.X: ("x", "sx"),
}

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-9

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)


class StateValidationError(ArithmeticError):
    """Raised in validation mode when a state leaves the density-matrix set."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """State of an m-qubit register as a 2^m x 2^m complex matrix."""

    register_size: int
    data: np.ndarray

    @classmethod
    def ground(cls, register_size: int) -> "DensityMatrix":
        """|0...0><0...0|."""
        dim = 2**register_size
        data = np.zeros((dim, dim), dtype=np.complex128)
        data[0, 0] = 1.0
        return cls(register_size, data)

    @classmethod
    def maximally_mixed(cls, register_size: int) -> "DensityMatrix":
        dim = 2**register_size
        return cls(register_size, np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def from_array(cls, data: np.ndarray) -> "DensityMatrix":
        data = np.asarray(data, dtype=np.complex128)
        register_size = int(round(np.log2(data.shape[0])))
        if data.shape != (2**register_size, 2**register_size):
            raise CircuitError(f"density matrix must be 2^m x 2^m, got {data.shape}")
        return cls(register_size, data)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def violations(self) -> list[str]:
        """Invariant violations (Hermiticity, unit trace, positivity); empty when valid."""
        problems = []
        herm = float(np.max(np.abs(self.data - self.data.conj().T)))
        if herm > HERMITICITY_TOL:
            problems.append(f"hermiticity deviation {herm:.3e}")
        trace_err = abs(self.trace() - 1.0)
        if trace_err > TRACE_TOL:
            problems.append(f"trace deviation {trace_err:.3e}")
        min_eig = float(np.min(np.linalg.eigvalsh((self.data + self.data.conj().T) / 2)))
        if min_eig < -EIGENVALUE_TOL:
            problems.append(f"negative eigenvalue {min_eig:.3e}")
        return problems

    def probabilities(self) -> np.ndarray:
        """Computational-basis distribution: diag(rho) clamped at 0 and renormalized."""
        p = np.clip(self.data.diagonal().real, 0.0, None)
        return p / p.sum()


def gate_unitary(gate: Gate, angle: float | None = None) -> np.ndarray:
    """Unitary of a gate; ``angle`` overrides the bound parameter."""
    theta = gate.param if angle is None else angle
    if gate.kind is GateKind.RY:
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if gate.kind is GateKind.RZ:
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    if gate.kind is GateKind.X:
        return _X
    return _CX


def unitary_superoperator(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u.conj())


def _apply_superoperator(tensor_state: np.ndarray, superop: np.ndarray, qubits: tuple[int, ...], m: int) -> np.ndarray:
    """Apply a k-qubit superoperator to the (2,)*2m state tensor on ``qubits``."""
    k = len(qubits)
    s = superop.reshape((2,) * (4 * k))
    axes = list(qubits) + [m + q for q in qubits]
    out = np.tensordot(s, tensor_state, axes=(list(range(2 * k, 4 * k)), axes))
    return np.moveaxis(out, list(range(2 * k)), axes)


@dataclass(frozen=True)
class _GateNoise:
    channels: tuple[KrausChannel, ...]
    superop: np.ndarray | None  # None when the noise is exactly the identity


class DensityMatrixSimulator:
    """Runs circuits on a dense density matrix, optionally on a twin.

    An instance keeps a per-(gate kind, qubits) cache of noise channels and is
    meant to be owned by one task at a time.
    """

    def __init__(self, twin: QuantumDigitalTwin | None = None, validate: bool | None = None):
        self.twin = twin
        self.validate = settings.validate_states if validate is None else validate
        self._noise_cache: dict[tuple[GateKind, tuple[int, ...]], _GateNoise] = {}

    def _gate_noise_params(self, kind: GateKind) -> GateNoise | None:
        if kind is GateKind.CX:
            return self.twin.two_qubit_gate_noise
        for name in CALIBRATION_NAMES[kind]:
            if name in self.twin.one_qubit_gate_noise:
                return self.twin.one_qubit_gate_noise[name]
        logger.debug(f"Twin seed={self.twin.seed} has no calibration for {kind}, running it noiselessly")
        return None

    def _noise_for(self, gate: Gate) -> _GateNoise:
        key = (gate.kind, gate.qubits)
        cached = self._noise_cache.get(key)
        if cached is not None:
            return cached

        params = self._gate_noise_params(gate.kind)
        channels: list[KrausChannel] = []
        if params is not None:
            thermal = [
                thermal_relaxation_channel(self.twin.qubit_noise[q].t1, self.twin.qubit_noise[q].t2, params.duration)
                for q in gate.qubits
            ]
            relax = thermal[0] if len(thermal) == 1 else tensor(thermal[0], thermal[1])
            depol = depolarizing_channel(params.error_rate, arity=len(gate.qubits))
            channels = [c for c in (relax, depol) if not c.is_identity]

        superop = None
        if channels:
            combined = channels[0] if len(channels) == 1 else compose(channels[0], channels[1])
            superop = combined.superoperator()
        entry = _GateNoise(channels=tuple(channels), superop=superop)
        self._noise_cache[key] = entry
        return entry

    def _check(self, state: np.ndarray, m: int, where: str):
        dim = 2**m
        problems = DensityMatrix(m, state.reshape(dim, dim)).violations()
        if problems:
            raise StateValidationError(f"after {where}: {', '.join(problems)}")

    def run(self, circuit: Circuit, values: Mapping[str, float] | None = None) -> DensityMatrix:
        """Evolve |0...0><0...0| through the circuit.

        Args:
            circuit: Circuit whose slots are bound, or resolvable from ``values``
            values: Optional slot -> angle bindings

        Returns:
            Final DensityMatrix
        """
        m = circuit.register_size
        if m > settings.max_register_size:
            raise CircuitError(f"register size {m} exceeds the dense simulation cap {settings.max_register_size}")
        if self.twin is not None and self.twin.register_size != m:
            raise CircuitError(f"circuit has {m} qubits but the twin has {self.twin.register_size}")
        values = values or {}
        for slot in circuit.slot_table:
            if slot not in values:
                raise CircuitError(f"unbound parameter slot '{slot}'")

        dim = 2**m
        state = DensityMatrix.ground(m).data.reshape((2,) * (2 * m))
        for position, gate in enumerate(circuit.gates):
            angle = values[gate.slot] if gate.slot is not None else None
            gate_op = unitary_superoperator(gate_unitary(gate, angle))
            noise = self._noise_for(gate) if self.twin is not None else None

            if not self.validate:
                superop = gate_op if noise is None or noise.superop is None else noise.superop @ gate_op
                state = _apply_superoperator(state, superop, gate.qubits, m)
                continue

            state = _apply_superoperator(state, gate_op, gate.qubits, m)
            self._check(state, m, f"gate {position} ({gate.kind})")
            for channel in noise.channels if noise is not None else ():
                state = _apply_superoperator(state, channel.superoperator(), gate.qubits, m)
                self._check(state, m, f"noise of gate {position} ({gate.kind})")

        return DensityMatrix(m, np.ascontiguousarray(state.reshape(dim, dim)))


def run_density(
    circuit: Circuit,
    twin: QuantumDigitalTwin | None = None,
    values: Mapping[str, float] | None = None,
    validate: bool | None = None,
) -> DensityMatrix:
    """Simulate a circuit, noiselessly or on a twin."""
    return DensityMatrixSimulator(twin, validate=validate).run(circuit, values)


def expectation_z(rho: DensityMatrix) -> np.ndarray:
    """<Z_i> = Tr(rho Z_i) for every qubit i."""
    m = rho.register_size
    diag = rho.data.diagonal().real.reshape((2,) * m)
    out = np.empty(m)
    for q in range(m):
        marginal = diag.sum(axis=tuple(a for a in range(m) if a != q))
        out[q] = marginal[0] - marginal[1]
    return out
