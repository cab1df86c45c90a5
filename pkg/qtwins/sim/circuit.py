"""Circuit intermediate representation.

Gates are RY, RZ, X (one qubit) and CX (control, target). Rotation gates
carry either a bound angle in radians or a symbolic parameter slot.
"""

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum


class CircuitError(ValueError):
    """Raised for malformed circuits or unbound/mismatched parameters."""


class GateKind(StrEnum):
    RY = "RY"
    RZ = "RZ"
    X = "X"
    CX = "CX"

    @property
    def arity(self) -> int:
        return 2 if self is GateKind.CX else 1

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RY, GateKind.RZ)


@dataclass(frozen=True, slots=True)
class Gate:
    """One gate application."""

    kind: GateKind
    qubits: tuple[int, ...]
    param: float | None = None
    slot: str | None = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(self.qubits) != kind.arity:
            raise CircuitError(f"{kind} acts on {kind.arity} qubit(s), got {list(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{kind} qubits must be distinct, got {list(self.qubits)}")
        if kind.is_rotation:
            if (self.param is None) == (self.slot is None):
                raise CircuitError(f"{kind} needs exactly one of a bound angle or a parameter slot")
            if self.param is not None and not math.isfinite(self.param):
                raise CircuitError(f"{kind} angle must be finite, got {self.param}")
        elif self.param is not None or self.slot is not None:
            raise CircuitError(f"{kind} takes no parameter")

    @property
    def is_bound(self) -> bool:
        return self.slot is None

    def to_dict(self) -> dict:
        entry: dict = {"kind": str(self.kind), "qubits": list(self.qubits)}
        if self.param is not None:
            entry["param"] = self.param
        if self.slot is not None:
            entry["slot"] = self.slot
        return entry


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on a register of ``register_size`` qubits."""

    register_size: int
    gates: tuple[Gate, ...] = ()
    slot_table: dict[str, tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.register_size < 1:
            raise CircuitError(f"register size must be >= 1, got {self.register_size}")
        object.__setattr__(self, "gates", tuple(self.gates))
        table: dict[str, list[int]] = {}
        for position, gate in enumerate(self.gates):
            if any(q >= self.register_size or q < 0 for q in gate.qubits):
                raise CircuitError(
                    f"gate {position} ({gate.kind} on {list(gate.qubits)}) outside a {self.register_size}-qubit register"
                )
            if gate.slot is not None:
                table.setdefault(gate.slot, []).append(position)
        object.__setattr__(self, "slot_table", {slot: tuple(pos) for slot, pos in table.items()})

    @property
    def is_bound(self) -> bool:
        return not self.slot_table

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.register_size != self.register_size:
            raise CircuitError(f"cannot join {self.register_size}- and {other.register_size}-qubit circuits")
        return Circuit(self.register_size, self.gates + other.gates)

    def bind(self, values: Mapping[str, float]) -> "Circuit":
        """Bind slots to angles; slots missing from ``values`` stay symbolic."""
        gates = []
        for gate in self.gates:
            if gate.slot is not None and gate.slot in values:
                gates.append(Gate(gate.kind, gate.qubits, param=float(values[gate.slot])))
            else:
                gates.append(gate)
        return Circuit(self.register_size, tuple(gates))

    def to_json(self) -> str:
        """Debug dump: list of {kind, qubits, param | slot}."""
        return json.dumps([g.to_dict() for g in self.gates])


def build_embedding_circuit(register_size: int, features: Sequence[float]) -> Circuit:
    """Angle embedding: RY(feature_i) on qubit i."""
    if len(features) != register_size:
        raise CircuitError(f"expected {register_size} features, got {len(features)}")
    gates = tuple(Gate(GateKind.RY, (i,), param=float(f)) for i, f in enumerate(features))
    return Circuit(register_size, gates)


def build_variational_layer(register_size: int, slots: Sequence[str], entangle: bool = False) -> Circuit:
    """RY(slot_i) on each qubit, optionally followed by a CX ring 0->1->...->m-1->0."""
    if len(slots) != register_size:
        raise CircuitError(f"expected {register_size} slots, got {len(slots)}")
    if len(set(slots)) != len(slots):
        raise CircuitError(f"duplicate parameter slots in {list(slots)}")
    gates = [Gate(GateKind.RY, (i,), slot=s) for i, s in enumerate(slots)]
    if entangle and register_size > 1:
        gates.extend(Gate(GateKind.CX, (i, (i + 1) % register_size)) for i in range(register_size))
    return Circuit(register_size, tuple(gates))
