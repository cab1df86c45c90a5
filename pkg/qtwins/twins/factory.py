"""Twin construction by resampling calibration records.

Each simulated qubit receives one whole calibration record drawn uniformly
with replacement, so T1, T2 and readout errors stay correlated as measured.
"""

import logging
from collections import defaultdict

import numpy as np
from calibration import CalibrationSnapshot, GateRecord
from noise import clamp_t2

from .models import MAX_SEED, GateNoise, QuantumDigitalTwin, QubitNoise, TwinSource

logger = logging.getLogger(__name__)

_MASK64 = MAX_SEED
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class TwinSamplingError(ValueError):
    """Raised when a twin cannot be sampled from the given inputs."""


def splitmix64(x: int) -> int:
    """One splitmix64 output for state ``x``."""
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def split_seed(seed: int, index: int) -> int:
    """Derive the independent 64-bit seed of stream ``index`` from ``seed``."""
    if index < 0:
        raise ValueError("index must be non-negative")
    return splitmix64((seed + (index + 1) * _GOLDEN_GAMMA) & _MASK64)


def _draw_gate(records: list[GateRecord], rng: np.random.Generator) -> GateNoise:
    chosen = records[int(rng.integers(0, len(records)))]
    return GateNoise(duration=chosen.duration, error_rate=chosen.error_rate)


def sample_twin(snapshot: CalibrationSnapshot, register_size: int, seed: int) -> QuantumDigitalTwin:
    """Sample a twin of ``register_size`` qubits from a snapshot.

    Args:
        snapshot: Calibration snapshot to resample
        register_size: Number of simulated qubits (m)
        seed: 64-bit seed; (snapshot, m, seed) fully determines the twin

    Returns:
        QuantumDigitalTwin with provenance (backend, timestamp, seed)
    """
    if register_size < 1:
        raise TwinSamplingError(f"register size must be >= 1, got {register_size}")
    if not snapshot.qubits:
        raise TwinSamplingError(f"snapshot {snapshot.key} has no qubit records")
    if not 0 <= seed <= MAX_SEED:
        raise TwinSamplingError(f"seed must be a 64-bit unsigned integer, got {seed}")

    rng = np.random.default_rng(seed)
    records = snapshot.qubits

    qubit_noise = []
    for pick in rng.integers(0, len(records), size=register_size):
        record = records[int(pick)]
        t2 = clamp_t2(record.t1, record.t2, label=f"{snapshot.backend_name} qubit {record.qubit_id}")
        qubit_noise.append(
            QubitNoise(
                t1=record.t1,
                t2=t2,
                prob_meas1_prep0=record.prob_meas1_prep0,
                prob_meas0_prep1=record.prob_meas0_prep1,
                source_qubit=record.qubit_id,
            )
        )

    single: dict[str, list[GateRecord]] = defaultdict(list)
    double: list[GateRecord] = []
    for gate in snapshot.gates:
        if gate.arity == 1:
            single[gate.gate_name].append(gate)
        else:
            double.append(gate)

    one_qubit_gate_noise = {name: _draw_gate(single[name], rng) for name in sorted(single)}
    two_qubit_gate_noise = _draw_gate(double, rng) if double else GateNoise()

    twin = QuantumDigitalTwin(
        register_size=register_size,
        qubit_noise=tuple(qubit_noise),
        one_qubit_gate_noise=one_qubit_gate_noise,
        two_qubit_gate_noise=two_qubit_gate_noise,
        seed=seed,
        source=TwinSource(backend_name=snapshot.backend_name, timestamp=snapshot.timestamp),
    )
    logger.debug(
        f"Sampled twin seed={seed} from {snapshot.key}: qubits {[q.source_qubit for q in qubit_noise]}"
    )
    return twin


def replicate_twins(
    snapshot: CalibrationSnapshot,
    n: int,
    register_size: int,
    master_seed: int,
    identical: bool = False,
) -> list[QuantumDigitalTwin]:
    """Sample ``n`` twins with seeds ``split_seed(master_seed, i)``.

    With ``identical`` every twin reuses ``split_seed(master_seed, 0)``.
    """
    if n < 1:
        raise TwinSamplingError(f"twin count must be >= 1, got {n}")
    seeds = [split_seed(master_seed, 0 if identical else i) for i in range(n)]
    twins = [sample_twin(snapshot, register_size, seed) for seed in seeds]
    logger.info(f"Replicated {n} {'identical ' if identical else ''}twins of {snapshot.key} (m={register_size})")
    return twins


def rebuild_twin(snapshot: CalibrationSnapshot, twin: QuantumDigitalTwin) -> QuantumDigitalTwin:
    """Re-sample a twin from its recorded provenance."""
    if (snapshot.backend_name, snapshot.timestamp) != (twin.source.backend_name, twin.source.timestamp):
        raise TwinSamplingError(f"twin was sampled from {twin.source.backend_name}, not {snapshot.key}")
    return sample_twin(snapshot, twin.register_size, twin.seed)
