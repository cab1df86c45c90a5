"""Quantum digital twin models."""

import json
from datetime import datetime
from statistics import fmean

from calibration import format_timestamp, parse_timestamp
from noise import ConfusionMatrix, readout_confusion
from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator

MAX_SEED = 2**64 - 1


class QubitNoise(BaseModel):
    """Noise parameters of one simulated qubit, drawn from a calibration record."""

    t1: float = Field(gt=0)  # us
    t2: float = Field(gt=0)  # us, <= 2 * t1
    prob_meas1_prep0: float = Field(ge=0, le=1)
    prob_meas0_prep1: float = Field(ge=0, le=1)
    source_qubit: int | None = None  # Calibration qubit the record was drawn from

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _check_t2(self) -> "QubitNoise":
        if self.t2 > 2 * self.t1:
            raise ValueError(f"t2={self.t2} exceeds 2*t1={2 * self.t1}; clamp before building the twin")
        return self

    @property
    def confusion(self) -> ConfusionMatrix:
        return readout_confusion(self.prob_meas1_prep0, self.prob_meas0_prep1)

    @property
    def readout_error(self) -> float:
        return (self.prob_meas1_prep0 + self.prob_meas0_prep1) / 2


class GateNoise(BaseModel):
    """Duration (ns) and average infidelity of one gate type."""

    duration: float = Field(default=0.0, ge=0)
    error_rate: float = Field(default=0.0, ge=0, le=1)

    class Config:
        frozen = True


class TwinSource(BaseModel):
    """Provenance: the snapshot a twin was sampled from."""

    backend_name: str
    timestamp: datetime

    class Config:
        frozen = True

    @field_validator("timestamp", mode="before")
    @classmethod
    def _parse_timestamp(cls, value):
        return parse_timestamp(value)

    @field_serializer("timestamp")
    def _serialize_timestamp(self, ts: datetime) -> str:
        return format_timestamp(ts)


class TwinSummary(BaseModel):
    """Averaged noise figures of a twin."""

    mean_t1: float
    mean_t2: float
    mean_readout_error: float
    one_qubit_errors: dict[str, float]
    two_qubit_error: float

    def line(self) -> str:
        parts = [f"T1={self.mean_t1:.1f}us", f"T2={self.mean_t2:.1f}us", f"readout={self.mean_readout_error:.4f}"]
        parts.extend(f"{name}={err:.3e}" for name, err in self.one_qubit_errors.items())
        parts.append(f"2q={self.two_qubit_error:.3e}")
        return " ".join(parts)


class QuantumDigitalTwin(BaseModel):
    """Small simulated register whose noise was sampled from a calibration snapshot."""

    register_size: int = Field(ge=1)
    qubit_noise: tuple[QubitNoise, ...]
    one_qubit_gate_noise: dict[str, GateNoise] = {}
    two_qubit_gate_noise: GateNoise = GateNoise()
    seed: int = Field(ge=0, le=MAX_SEED)
    source: TwinSource

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _check_size(self) -> "QuantumDigitalTwin":
        if len(self.qubit_noise) != self.register_size:
            raise ValueError(f"expected {self.register_size} qubit noise sets, got {len(self.qubit_noise)}")
        return self

    @property
    def confusions(self) -> list[ConfusionMatrix]:
        return [q.confusion for q in self.qubit_noise]

    def describe(self) -> TwinSummary:
        """Mean noise figures, used for per-twin reporting."""
        return TwinSummary(
            mean_t1=fmean(q.t1 for q in self.qubit_noise),
            mean_t2=fmean(q.t2 for q in self.qubit_noise),
            mean_readout_error=fmean(q.readout_error for q in self.qubit_noise),
            one_qubit_errors={name: g.error_rate for name, g in self.one_qubit_gate_noise.items()},
            two_qubit_error=self.two_qubit_gate_noise.error_rate,
        )

    def to_json(self) -> str:
        """Serialize deterministically; two runs with equal inputs give identical text."""
        return json.dumps(self.model_dump(mode="json"), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str | bytes) -> "QuantumDigitalTwin":
        return cls.model_validate_json(text)
