"""CPTP noise channels in Kraus form.

Thermal relaxation (zero temperature) is fixed by its action on a
single-qubit density matrix over an elapsed time t:

    rho00' = rho00 + gamma * rho11
    rho11' = (1 - gamma) * rho11          gamma = 1 - exp(-t / T1)
    rho01' = exp(-t / T2) * rho01

realized as amplitude damping followed by a phase flip that supplies the
extra dephasing beyond exp(-t / 2T1).
"""

import functools
import itertools
import logging
from dataclasses import dataclass

import numpy as np
from config import settings

logger = logging.getLogger(__name__)

I2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (I2, PAULI_X, PAULI_Y, PAULI_Z)

NS_PER_US = 1000.0


class ChannelError(ValueError):
    """Raised for invalid channel parameters or mismatched arities."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Quantum channel rho -> sum_k K_k rho K_k^dagger on 1 or 2 qubits."""

    operators: tuple[np.ndarray, ...]
    arity: int

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ChannelError(f"arity must be 1 or 2, got {self.arity}")
        if not self.operators:
            raise ChannelError("a channel needs at least one Kraus operator")
        d = self.dim
        operators = tuple(np.array(op, dtype=np.complex128) for op in self.operators)
        for op in operators:
            if op.shape != (d, d):
                raise ChannelError(f"Kraus operator shape {op.shape} does not match dimension {d}")
            op.setflags(write=False)
        # Private read-only copies; the caller's arrays stay writable
        object.__setattr__(self, "operators", operators)

    @property
    def dim(self) -> int:
        return 2**self.arity

    @property
    def is_identity(self) -> bool:
        """True when the channel is exactly the single operator I."""
        return len(self.operators) == 1 and np.array_equal(self.operators[0], np.eye(self.dim))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the channel to a d x d density matrix."""
        out = np.zeros_like(rho, dtype=np.complex128)
        for op in self.operators:
            out += op @ rho @ op.conj().T
        return out

    def superoperator(self) -> np.ndarray:
        """Row-major superoperator S with vec(E(rho)) = S @ vec(rho)."""
        return sum(np.kron(op, op.conj()) for op in self.operators)


@dataclass(frozen=True)
class CptpReport:
    """Completeness check result."""

    passed: bool
    residual: float  # max |sum K^dagger K - I| entry


def _channel(operators: list[np.ndarray], arity: int) -> KrausChannel:
    """Build a channel, dropping operators that are exactly zero."""
    kept = [op for op in operators if np.any(op != 0)]
    if not kept:
        kept = [np.zeros((2**arity, 2**arity), dtype=np.complex128)]
    return KrausChannel(operators=tuple(kept), arity=arity)


def identity_channel(arity: int = 1) -> KrausChannel:
    return KrausChannel(operators=(np.eye(2**arity, dtype=np.complex128),), arity=arity)


def clamp_t2(t1: float, t2: float, label: str = "") -> float:
    """Clamp T2 to the physical bound 2*T1, logging when data exceeds it."""
    if t2 > 2 * t1:
        logger.warning(f"{label or 'qubit'}: T2={t2} us exceeds 2*T1={2 * t1} us, clamping")
        return 2 * t1
    return t2


def thermal_relaxation_channel(t1: float, t2: float, duration: float) -> KrausChannel:
    """Zero-temperature thermal relaxation over a gate duration.

    Args:
        t1: Relaxation time in microseconds
        t2: Dephasing time in microseconds (clamped to 2*t1)
        duration: Elapsed time in nanoseconds

    Returns:
        Single-qubit channel with the action given in the module docstring
    """
    if not (t1 > 0 and np.isfinite(t1)):
        raise ChannelError(f"t1 must be positive, got {t1}")
    if not (t2 > 0 and np.isfinite(t2)):
        raise ChannelError(f"t2 must be positive, got {t2}")
    if not (duration >= 0 and np.isfinite(duration)):
        raise ChannelError(f"duration must be non-negative, got {duration}")
    t2 = clamp_t2(t1, t2)

    t = duration / NS_PER_US
    gamma = -np.expm1(-t / t1)
    keep = np.exp(-t / (2 * t1))  # sqrt(1 - gamma)
    # Residual coherence factor beyond amplitude damping; <= 1 since t2 <= 2*t1
    extra = min(1.0, np.exp(-t / t2 + t / (2 * t1)))
    p_flip = (1.0 - extra) / 2

    damp0 = np.array([[1, 0], [0, keep]], dtype=np.complex128)
    damp1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    a, b = np.sqrt(1 - p_flip), np.sqrt(p_flip)
    return _channel([a * damp0, a * damp1, b * (PAULI_Z @ damp0), b * (PAULI_Z @ damp1)], arity=1)


@functools.cache
def _pauli_basis(arity: int) -> tuple[np.ndarray, ...]:
    ops = []
    for combo in itertools.product(PAULIS, repeat=arity):
        op = combo[0]
        for factor in combo[1:]:
            op = np.kron(op, factor)
        ops.append(op)
    return tuple(ops)


def depolarizing_strength(error_rate: float, arity: int) -> float:
    """Average gate infidelity -> depolarizing probability lambda = min(1, e*d/(d-1))."""
    d = 2**arity
    return min(1.0, error_rate * d / (d - 1))


def depolarizing_channel(error_rate: float, arity: int = 1) -> KrausChannel:
    """Depolarizing channel rho -> (1 - lam) rho + lam I/d from an average gate infidelity.

    Args:
        error_rate: Average gate infidelity in [0, 1]
        arity: Number of qubits (1 or 2)

    Returns:
        Pauli-Kraus realization of the channel
    """
    if arity not in (1, 2):
        raise ChannelError(f"arity must be 1 or 2, got {arity}")
    if not (0.0 <= error_rate <= 1.0):
        raise ChannelError(f"error_rate must be in [0, 1], got {error_rate}")
    d = 2**arity
    lam = depolarizing_strength(error_rate, arity)
    # I/d = (1/d^2) sum_P P rho P over the d^2 Paulis
    paulis = _pauli_basis(arity)
    ops = [np.sqrt(1 - lam + lam / d**2) * paulis[0]]
    ops.extend(np.sqrt(lam / d**2) * p for p in paulis[1:])
    return _channel(ops, arity)


def compose(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Channel that applies ``a`` then ``b``: operators {B_j A_i}."""
    if a.arity != b.arity:
        raise ChannelError(f"cannot compose arity {a.arity} with arity {b.arity}")
    if a.is_identity:
        return b
    if b.is_identity:
        return a
    return _channel([bj @ ai for ai in a.operators for bj in b.operators], a.arity)


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Independent channels on two qubits: operators {A_i (x) B_j}, ``a`` on the first qubit."""
    if a.arity != 1 or b.arity != 1:
        raise ChannelError("tensor products are only built from single-qubit channels")
    return _channel([np.kron(ai, bj) for ai in a.operators for bj in b.operators], arity=2)


def validate_cptp(channel: KrausChannel, tolerance: float | None = None) -> CptpReport:
    """Check completeness sum_k K_k^dagger K_k = I entrywise."""
    tolerance = settings.cptp_tolerance if tolerance is None else tolerance
    total = sum(op.conj().T @ op for op in channel.operators)
    residual = float(np.max(np.abs(total - np.eye(channel.dim))))
    return CptpReport(passed=residual <= tolerance, residual=residual)
