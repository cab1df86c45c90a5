"""Calibration data models.

Units are fixed: T1/T2 in microseconds, gate durations in nanoseconds,
probabilities and gate errors dimensionless.
"""

import re
from datetime import UTC, datetime
from enum import StrEnum

from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

BACKEND_NAME = re.compile(r"[A-Za-z0-9_-]+")


class SnapshotFormat(StrEnum):
    """Input formats accepted by the snapshot parser."""

    CANONICAL_JSON = "canonical-json"
    CALIBRATION_CSV = "calibration-csv"


class TimestampSelector(StrEnum):
    """How a timestamp query resolves against the store."""

    EXACT = "exact"
    LATEST_BEFORE = "latest-before"


class HistogramProperty(StrEnum):
    """Calibration properties that can be histogrammed."""

    T1 = "t1"
    T2 = "t2"
    READOUT_ERROR = "readout_error"
    GATE_ERROR = "gate_error"


def parse_timestamp(value: str | datetime) -> datetime:
    """Parse an ISO-8601 instant into an aware UTC datetime at second resolution.

    Naive values are taken as UTC.
    """
    if isinstance(value, datetime):
        ts = value
    else:
        ts = datetime.fromisoformat(value.strip())
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=UTC)
    return ts.astimezone(UTC).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    """Format a UTC datetime in the canonical ``YYYY-MM-DDThh:mm:ssZ`` form."""
    return ts.astimezone(UTC).strftime(TIMESTAMP_FORMAT)


def check_backend_name(name: str) -> str:
    """Backend names double as store directory names: letters, digits, ``_`` and ``-`` only."""
    if not isinstance(name, str) or not BACKEND_NAME.fullmatch(name):
        raise ValueError(f"backend name {name!r} must match [A-Za-z0-9_-]+")
    return name


class QubitRecord(BaseModel):
    """Per-qubit calibration record."""

    qubit_id: int = Field(alias="id", ge=0)
    t1: float = Field(alias="t1_us", gt=0, allow_inf_nan=False)
    t2: float = Field(alias="t2_us", gt=0, allow_inf_nan=False)
    prob_meas1_prep0: float = Field(ge=0, le=1, allow_inf_nan=False)
    prob_meas0_prep1: float = Field(ge=0, le=1, allow_inf_nan=False)

    class Config:
        frozen = True
        populate_by_name = True

    @property
    def readout_error(self) -> float:
        """Symmetric readout error: mean of the two confusion probabilities."""
        return (self.prob_meas1_prep0 + self.prob_meas0_prep1) / 2


class GateRecord(BaseModel):
    """Per-gate calibration record (one per gate name and qubit tuple)."""

    gate_name: str = Field(alias="name", min_length=1)
    qubits: tuple[int, ...]
    duration: float = Field(alias="duration_ns", ge=0, allow_inf_nan=False)
    error_rate: float = Field(alias="error", ge=0, le=1, allow_inf_nan=False)

    class Config:
        frozen = True
        populate_by_name = True

    @field_validator("qubits")
    @classmethod
    def _check_qubits(cls, qubits: tuple[int, ...]) -> tuple[int, ...]:
        if len(qubits) not in (1, 2):
            raise ValueError("gate must act on 1 or 2 qubits")
        if len(set(qubits)) != len(qubits):
            raise ValueError("gate qubit indices must be distinct")
        if any(q < 0 for q in qubits):
            raise ValueError("qubit indices must be non-negative")
        return qubits

    @property
    def arity(self) -> int:
        return len(self.qubits)


class CalibrationSnapshot(BaseModel):
    """Timestamped calibration data of one backend."""

    backend_name: str = Field(alias="backend")
    timestamp: datetime
    qubits: tuple[QubitRecord, ...]
    gates: tuple[GateRecord, ...] = ()

    class Config:
        frozen = True
        populate_by_name = True

    @field_validator("backend_name")
    @classmethod
    def _check_backend(cls, name: str) -> str:
        return check_backend_name(name)

    @field_validator("timestamp", mode="before")
    @classmethod
    def _parse_timestamp(cls, value):
        return parse_timestamp(value)

    @model_validator(mode="after")
    def _check_references(self) -> "CalibrationSnapshot":
        if not self.qubits:
            raise ValueError("empty qubit list")
        ids = sorted(q.qubit_id for q in self.qubits)
        if ids != list(range(len(ids))):
            raise ValueError(f"qubit ids must be 0..{len(ids) - 1} without gaps or duplicates")
        n = len(ids)
        for gate in self.gates:
            missing = [q for q in gate.qubits if q >= n]
            if missing:
                raise ValueError(f"gate {gate.gate_name}{list(gate.qubits)} references unknown qubit {missing[0]}")
        return self

    @field_serializer("timestamp")
    def _serialize_timestamp(self, ts: datetime) -> str:
        return format_timestamp(ts)

    @property
    def key(self) -> "SnapshotKey":
        return SnapshotKey(backend_name=self.backend_name, timestamp=self.timestamp)

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def qubit(self, qubit_id: int) -> QubitRecord:
        """Look up a qubit record by id."""
        for record in self.qubits:
            if record.qubit_id == qubit_id:
                return record
        raise KeyError(qubit_id)


class SnapshotKey(BaseModel):
    """Store key of a snapshot: (backend, timestamp)."""

    backend_name: str
    timestamp: datetime

    class Config:
        frozen = True

    @field_validator("backend_name")
    @classmethod
    def _check_backend(cls, name: str) -> str:
        return check_backend_name(name)

    @field_validator("timestamp", mode="before")
    @classmethod
    def _parse_timestamp(cls, value):
        return parse_timestamp(value)

    @field_serializer("timestamp")
    def _serialize_timestamp(self, ts: datetime) -> str:
        return format_timestamp(ts)

    def __str__(self) -> str:
        return f"{self.backend_name}@{format_timestamp(self.timestamp)}"

    @classmethod
    def parse(cls, text: str) -> "SnapshotKey":
        """Parse the ``backend@timestamp`` form printed by the CLI."""
        backend, sep, ts = text.partition("@")
        if not sep or not backend or not ts:
            raise ValueError(f"snapshot key {text!r} must look like backend@YYYY-MM-DDThh:mm:ssZ")
        return cls(backend_name=backend, timestamp=ts)


class ParseResult(BaseModel):
    """Snapshot plus the warning records produced while parsing it."""

    snapshot: CalibrationSnapshot
    warnings: list[str] = []


class HistogramSummary(BaseModel):
    """Summary statistics of a histogrammed property (property units)."""

    count: int
    mean: float
    std: float  # Population standard deviation
    min: float
    max: float

    def line(self) -> str:
        return f"mean={self.mean!r} std={self.std!r} min={self.min!r} max={self.max!r}"


class Histogram(BaseModel):
    """Equal-width histogram of one calibration property."""

    property_name: HistogramProperty
    bin_edges: list[float]
    counts: list[int]
    summary: HistogramSummary

    def to_csv(self) -> str:
        """Render as CSV with header ``bin_lo,bin_hi,count``."""
        lines = ["bin_lo,bin_hi,count"]
        for lo, hi, count in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts, strict=True):
            lines.append(f"{lo!r},{hi!r},{count}")
        return "\n".join(lines) + "\n"
