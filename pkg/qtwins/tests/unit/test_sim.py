"""Unit tests for circuits, density-matrix simulation and measurement sampling."""

import json

import numpy as np
import pytest
from noise import depolarizing_channel, readout_confusion, thermal_relaxation_channel
from sim import (
    Circuit,
    CircuitError,
    DensityMatrix,
    DensityMatrixSimulator,
    Gate,
    GateKind,
    build_embedding_circuit,
    build_variational_layer,
    expectation_z,
    run_density,
    sample_counts,
)


def _oracle_single(kind, theta):
    if kind == "RY":
        return np.array([[np.cos(theta / 2), -np.sin(theta / 2)], [np.sin(theta / 2), np.cos(theta / 2)]])
    if kind == "RZ":
        return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])
    return np.array([[0, 1], [1, 0]])


def _oracle_full(gate, m):
    """Full 2^m unitary built from Kronecker products and an explicit CX permutation."""
    dim = 2**m
    if gate.kind is GateKind.CX:
        control, target = gate.qubits
        full = np.zeros((dim, dim))
        for b in range(dim):
            bits = [(b >> (m - 1 - q)) & 1 for q in range(m)]
            if bits[control]:
                bits[target] ^= 1
            image = int("".join(map(str, bits)), 2)
            full[image, b] = 1
        return full
    factors = [np.eye(2)] * m
    factors[gate.qubits[0]] = _oracle_single(str(gate.kind), gate.param)
    full = factors[0]
    for f in factors[1:]:
        full = np.kron(full, f)
    return full


def _oracle_run(circuit):
    dim = 2**circuit.register_size
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1
    for gate in circuit.gates:
        u = _oracle_full(gate, circuit.register_size)
        rho = u @ rho @ u.conj().T
    return rho


def _random_circuit(rng):
    m = int(rng.integers(1, 4))
    gates = []
    for _ in range(int(rng.integers(0, 11))):
        kinds = ["RY", "RZ", "X"] + (["CX"] if m > 1 else [])
        kind = kinds[int(rng.integers(0, len(kinds)))]
        if kind == "CX":
            control, target = rng.choice(m, size=2, replace=False)
            gates.append(Gate(GateKind.CX, (int(control), int(target))))
        elif kind == "X":
            gates.append(Gate(GateKind.X, (int(rng.integers(0, m)),)))
        else:
            gates.append(Gate(GateKind(kind), (int(rng.integers(0, m)),), param=float(rng.uniform(-np.pi, np.pi))))
    return Circuit(m, tuple(gates))


class TestCircuit:
    """Tests for the circuit IR."""

    def test_embedding_all_zero(self):
        """Zero features leave |0...0> with every <Z> = 1."""
        z = expectation_z(run_density(build_embedding_circuit(3, [0.0, 0.0, 0.0])))
        np.testing.assert_allclose(z, [1.0, 1.0, 1.0], atol=1e-15)

    def test_embedding_pi(self):
        """RY(pi) flips the qubit."""
        assert expectation_z(run_density(build_embedding_circuit(1, [np.pi])))[0] == pytest.approx(-1.0, abs=1e-15)

    def test_embedding_pi_over_three(self):
        """RY(pi/3) gives <Z> = 0.5."""
        assert expectation_z(run_density(build_embedding_circuit(1, [np.pi / 3])))[0] == pytest.approx(0.5, abs=1e-15)

    def test_embedding_length_mismatch(self):
        """Feature count must equal register size."""
        with pytest.raises(CircuitError):
            build_embedding_circuit(3, [0.1, 0.2])

    def test_variational_layer_shape(self):
        """Three slotted RY gates without the entangler."""
        layer = build_variational_layer(3, ["a", "b", "c"])
        assert len(layer.gates) == 3
        assert all(g.kind is GateKind.RY and g.slot is not None for g in layer.gates)
        assert layer.slot_table == {"a": (0,), "b": (1,), "c": (2,)}

    def test_variational_layer_entangled(self):
        """m=2 with the entangler has 2 RY and 2 CX gates."""
        layer = build_variational_layer(2, ["a", "b"], entangle=True)
        assert [g.kind for g in layer.gates] == [GateKind.RY, GateKind.RY, GateKind.CX, GateKind.CX]
        assert [g.qubits for g in layer.gates[2:]] == [(0, 1), (1, 0)]

    def test_variational_layer_bound_to_zero(self):
        """m=1 layer bound to 0 acts as identity."""
        rho = run_density(build_variational_layer(1, ["t"]), values={"t": 0.0})
        np.testing.assert_array_equal(rho.data, DensityMatrix.ground(1).data)

    def test_duplicate_slots(self):
        """Slot ids must be distinct."""
        with pytest.raises(CircuitError):
            build_variational_layer(2, ["t", "t"])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": GateKind.CX, "qubits": (0,)},
            {"kind": GateKind.CX, "qubits": (1, 1)},
            {"kind": GateKind.RY, "qubits": (0,)},
            {"kind": GateKind.RY, "qubits": (0,), "param": 0.1, "slot": "a"},
            {"kind": GateKind.X, "qubits": (0,), "param": 0.1},
            {"kind": GateKind.RZ, "qubits": (0,), "param": float("nan")},
        ],
    )
    def test_invalid_gates(self, kwargs):
        """Arity, distinct qubits and bound-xor-slotted are enforced."""
        with pytest.raises(CircuitError):
            Gate(**kwargs)

    def test_qubit_outside_register(self):
        """Gate qubits must be below m."""
        with pytest.raises(CircuitError):
            Circuit(2, (Gate(GateKind.X, (2,)),))

    def test_bind_and_concatenate(self):
        """Binding replaces slots; concatenation keeps order."""
        circuit = build_embedding_circuit(2, [0.1, 0.2]) + build_variational_layer(2, ["a", "b"])
        assert not circuit.is_bound
        bound = circuit.bind({"a": 0.3, "b": 0.4})
        assert bound.is_bound
        assert [g.param for g in bound.gates] == [0.1, 0.2, 0.3, 0.4]
        partial = circuit.bind({"a": 0.3})
        assert list(partial.slot_table) == ["b"]

    def test_concatenate_size_mismatch(self):
        """Circuits of different register size cannot be joined."""
        with pytest.raises(CircuitError):
            build_embedding_circuit(1, [0.0]) + build_embedding_circuit(2, [0.0, 0.0])

    def test_json_dump(self):
        """Debug dump lists kind, qubits and param or slot."""
        circuit = build_embedding_circuit(1, [0.5]) + build_variational_layer(1, ["t"])
        assert json.loads(circuit.to_json()) == [
            {"kind": "RY", "qubits": [0], "param": 0.5},
            {"kind": "RY", "qubits": [0], "slot": "t"},
        ]


class TestRunDensity:
    """Tests for the density-matrix engine."""

    def test_empty_circuit(self):
        """No gates leaves the |0...0> projector exactly."""
        rho = run_density(Circuit(3))
        np.testing.assert_array_equal(rho.data, DensityMatrix.ground(3).data)

    def test_oracle_equivalence(self):
        """200 random noiseless circuits match brute-force unitary conjugation."""
        rng = np.random.default_rng(2024)
        for _ in range(200):
            circuit = _random_circuit(rng)
            rho = run_density(circuit)
            assert np.max(np.abs(rho.data - _oracle_run(circuit))) <= 1e-10

    def test_bit_order(self):
        """Qubit 0 is the most significant bit."""
        rho = run_density(Circuit(2, (Gate(GateKind.X, (0,)),)))
        np.testing.assert_allclose(rho.probabilities(), [0, 0, 1, 0])
        np.testing.assert_allclose(expectation_z(rho), [-1.0, 1.0])

    def test_x_with_relaxation(self, twin_factory):
        """X lasting 100 us on T1 = 100 us leaves rho11 = e^-1."""
        twin = twin_factory(register_size=1, t1=100.0, t2=200.0, one_qubit=(100_000.0, 0.0))
        rho = run_density(Circuit(1, (Gate(GateKind.X, (0,)),)), twin)
        assert rho.data[1, 1].real == pytest.approx(np.exp(-1), abs=1e-12)

    def test_noise_order(self, twin_factory):
        """Per gate: unitary, then thermal relaxation, then depolarizing."""
        twin = twin_factory(register_size=1, t1=30.0, t2=20.0, one_qubit=(5_000.0, 0.02))
        theta = 0.7
        rho = run_density(Circuit(1, (Gate(GateKind.RY, (0,), param=theta),)), twin)
        u = _oracle_single("RY", theta)
        expected = u @ np.diag([1, 0]).astype(complex) @ u.conj().T
        expected = thermal_relaxation_channel(30.0, 20.0, 5_000.0).apply(expected)
        expected = depolarizing_channel(0.02).apply(expected)
        np.testing.assert_allclose(rho.data, expected, atol=1e-12)

    def test_zero_noise_twin_is_bitwise_noiseless(self, zero_noise_twin):
        """Identity noise channels leave results bit-identical."""
        rng = np.random.default_rng(5)
        for _ in range(20):
            circuit = _random_circuit(rng)
            if circuit.register_size != 3:
                continue
            np.testing.assert_array_equal(run_density(circuit, zero_noise_twin).data, run_density(circuit).data)

    def test_noisy_states_valid(self, noisy_twin):
        """Noisy runs in validation mode keep every density-matrix invariant."""
        rng = np.random.default_rng(6)
        simulator = DensityMatrixSimulator(noisy_twin, validate=True)
        for _ in range(30):
            gates = _random_circuit(np.random.default_rng(int(rng.integers(0, 2**32)))).gates
            circuit = Circuit(3, tuple(g for g in gates if max(g.qubits) < 3))
            rho = simulator.run(circuit)
            assert rho.violations() == []
            z = expectation_z(rho)
            assert np.all(np.abs(z) <= 1 + 1e-9)

    def test_validate_mode_matches_fast_path(self, noisy_twin):
        """Checked and unchecked evolution agree."""
        circuit = build_embedding_circuit(3, [0.3, -1.1, 2.0]) + build_variational_layer(3, ["a", "b", "c"], True)
        values = {"a": 0.5, "b": -0.2, "c": 1.3}
        fast = DensityMatrixSimulator(noisy_twin, validate=False).run(circuit, values)
        checked = DensityMatrixSimulator(noisy_twin, validate=True).run(circuit, values)
        np.testing.assert_allclose(fast.data, checked.data, atol=1e-12)

    def test_unbound_slot(self):
        """Running with an unbound slot fails."""
        with pytest.raises(CircuitError, match="unbound"):
            run_density(build_variational_layer(2, ["a", "b"]), values={"a": 0.1})

    def test_size_mismatch(self, twin_factory):
        """The twin must have the circuit's register size."""
        with pytest.raises(CircuitError):
            run_density(build_embedding_circuit(2, [0.0, 0.0]), twin_factory(register_size=3))

    def test_register_cap(self):
        """Registers above the dense cap are refused."""
        with pytest.raises(CircuitError):
            run_density(Circuit(11))


class TestExpectationZ:
    """Tests for Z expectations."""

    def test_ground(self):
        """All ones on the ground state."""
        np.testing.assert_array_equal(expectation_z(DensityMatrix.ground(3)), [1.0, 1.0, 1.0])

    def test_maximally_mixed(self):
        """All zeros on I/2^m."""
        np.testing.assert_allclose(expectation_z(DensityMatrix.maximally_mixed(3)), [0.0, 0.0, 0.0], atol=1e-15)

    def test_rotation_on_first_qubit(self):
        """RY(pi/3) on qubit 0 of 2 gives (0.5, 1)."""
        rho = run_density(Circuit(2, (Gate(GateKind.RY, (0,), param=np.pi / 3),)))
        np.testing.assert_allclose(expectation_z(rho), [0.5, 1.0], atol=1e-15)


class TestSampleCounts:
    """Tests for finite-shot sampling."""

    def test_perfect_readout_of_ground(self):
        """|0> with identity confusion always reads 0."""
        counts = sample_counts(DensityMatrix.ground(1), 1000, [readout_confusion(0.0, 0.0)], seed=1)
        assert counts == {"0": 1000}

    def test_readout_flip_rate(self):
        """prob_meas1_prep0 = 0.1 yields ~10% ones; 19 of 20 seeds within 3 sigma."""
        shots = 100_000
        sigma = np.sqrt(0.1 * 0.9 / shots)
        passed = 0
        for seed in range(20):
            counts = sample_counts(DensityMatrix.ground(1), shots, [readout_confusion(0.1, 0.0)], seed=seed)
            assert sum(counts.values()) == shots
            passed += abs(counts.get("1", 0) / shots - 0.1) <= 3 * sigma
        assert passed >= 19

    def test_maximally_mixed_symmetry(self):
        """I/2 gives each outcome about half the time."""
        shots = 100_000
        counts = sample_counts(DensityMatrix.maximally_mixed(1), shots, seed=3)
        for bit in ("0", "1"):
            assert abs(counts[bit] / shots - 0.5) <= 3 * np.sqrt(0.25 / shots)

    def test_deterministic_and_total(self):
        """Counts are reproducible per seed and always sum to shots."""
        rho = run_density(build_embedding_circuit(3, [0.4, 1.2, 2.5]))
        confusions = [readout_confusion(0.02, 0.05)] * 3
        a = sample_counts(rho, 777, confusions, seed=9)
        assert a == sample_counts(rho, 777, confusions, seed=9)
        assert sum(a.values()) == 777
        assert all(len(k) == 3 for k in a)

    def test_invalid_shots(self):
        """Shots must be at least 1."""
        with pytest.raises(CircuitError):
            sample_counts(DensityMatrix.ground(1), 0)
