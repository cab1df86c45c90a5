"""Shared test fixtures for qtwins tests."""

import sys
from pathlib import Path

import pytest

# Add qtwins to path
sys.path.insert(0, str(Path(__file__).parent.parent))


@pytest.fixture(scope="session")
def fixture_bytes() -> bytes:
    """Raw bytes of the bundled 127-qubit synthetic snapshot."""
    from config import FIXTURE_PATH

    return FIXTURE_PATH.read_bytes()


@pytest.fixture(scope="session")
def fixture_snapshot(fixture_bytes):
    """Parsed bundled snapshot."""
    from calibration import parse_snapshot

    return parse_snapshot(fixture_bytes)


@pytest.fixture
def store(tmp_path):
    """Empty snapshot store in a temporary directory."""
    from calibration import SnapshotStore

    return SnapshotStore(tmp_path / "store")


# ============================================================================
# Factory Fixtures for Test Data
# ============================================================================


@pytest.fixture
def snapshot_factory():
    """Factory to create small calibration snapshots."""

    def _create_snapshot(
        t1s=(100.0, 120.0, 90.0),
        t2s=None,
        readout=(0.01, 0.02),
        backend="test_backend",
        timestamp="2024-01-01T00:00:00Z",
        gates=None,
    ):
        from calibration import CalibrationSnapshot

        t2s = t2s or [t1 * 0.8 for t1 in t1s]
        qubits = [
            {"id": i, "t1_us": t1, "t2_us": t2, "prob_meas1_prep0": readout[0], "prob_meas0_prep1": readout[1]}
            for i, (t1, t2) in enumerate(zip(t1s, t2s, strict=True))
        ]
        if gates is None:
            gates = [{"name": "sx", "qubits": [i], "duration_ns": 50.0, "error": 2e-4} for i in range(len(t1s))]
            gates += [{"name": "x", "qubits": [i], "duration_ns": 50.0, "error": 2e-4} for i in range(len(t1s))]
            gates += [{"name": "rz", "qubits": [i], "duration_ns": 0.0, "error": 0.0} for i in range(len(t1s))]
            gates += [
                {"name": "ecr", "qubits": [i, i + 1], "duration_ns": 500.0, "error": 7e-3} for i in range(len(t1s) - 1)
            ]
        return CalibrationSnapshot.model_validate(
            {"backend": backend, "timestamp": timestamp, "qubits": qubits, "gates": gates}
        )

    return _create_snapshot


@pytest.fixture
def twin_factory():
    """Factory to create twins with uniform noise on every qubit."""

    def _create_twin(
        register_size=3,
        t1=100.0,
        t2=80.0,
        readout=(0.0, 0.0),
        one_qubit=(50.0, 1e-3),
        two_qubit=(500.0, 1e-2),
        seed=0,
    ):
        from twins import GateNoise, QuantumDigitalTwin, QubitNoise, TwinSource

        qubit = QubitNoise(t1=t1, t2=t2, prob_meas1_prep0=readout[0], prob_meas0_prep1=readout[1])
        single = GateNoise(duration=one_qubit[0], error_rate=one_qubit[1])
        return QuantumDigitalTwin(
            register_size=register_size,
            qubit_noise=(qubit,) * register_size,
            one_qubit_gate_noise={"sx": single, "x": single, "rz": GateNoise()},
            two_qubit_gate_noise=GateNoise(duration=two_qubit[0], error_rate=two_qubit[1]),
            seed=seed,
            source=TwinSource(backend_name="test_backend", timestamp="2024-01-01T00:00:00Z"),
        )

    return _create_twin


@pytest.fixture
def zero_noise_twin(twin_factory):
    """Three-qubit twin whose every channel is the identity."""
    return twin_factory(one_qubit=(0.0, 0.0), two_qubit=(0.0, 0.0))


@pytest.fixture
def noisy_twin(twin_factory):
    """Three-qubit twin with strong noise so its effect is visible."""
    return twin_factory(t1=2.0, t2=1.5, readout=(0.05, 0.08), one_qubit=(200.0, 2e-2), two_qubit=(600.0, 5e-2))


@pytest.fixture
def small_dataset():
    """Four-point cubic dataset on [-1, 1]."""
    from hybrid import generate_dataset

    return generate_dataset(4, (-1.0, 1.0), 0.1, seed=3)


@pytest.fixture
def small_config():
    """Narrow, short training config for fast tests."""
    from hybrid import TrainConfig

    return TrainConfig(epochs=3, hidden_width=6, seed=1)
