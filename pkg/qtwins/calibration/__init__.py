"""Calibration data ingestion, versioned storage and summaries.

Plays the role of the "QuantumDatabase": timestamped per-qubit (T1, T2,
readout confusion) and per-gate (duration, error) records of a real backend.
"""

from .histogram import PropertyUnavailableError, empirical_histogram, property_values
from .models import (
    CalibrationSnapshot,
    GateRecord,
    Histogram,
    HistogramProperty,
    HistogramSummary,
    ParseResult,
    QubitRecord,
    SnapshotFormat,
    SnapshotKey,
    TimestampSelector,
    format_timestamp,
    parse_timestamp,
)
from .parser import (
    SnapshotParseError,
    infer_csv_provenance,
    parse_snapshot,
    parse_snapshot_with_warnings,
    serialize_snapshot,
)
from .store import (
    SnapshotConflictError,
    SnapshotNotFoundError,
    SnapshotStore,
    list_snapshots,
    load_snapshot,
    store_snapshot,
)

__all__ = [
    "CalibrationSnapshot",
    "GateRecord",
    "Histogram",
    "HistogramProperty",
    "HistogramSummary",
    "ParseResult",
    "PropertyUnavailableError",
    "QubitRecord",
    "SnapshotConflictError",
    "SnapshotFormat",
    "SnapshotKey",
    "SnapshotNotFoundError",
    "SnapshotParseError",
    "SnapshotStore",
    "TimestampSelector",
    "empirical_histogram",
    "format_timestamp",
    "infer_csv_provenance",
    "list_snapshots",
    "load_snapshot",
    "parse_snapshot",
    "parse_snapshot_with_warnings",
    "parse_timestamp",
    "property_values",
    "serialize_snapshot",
    "store_snapshot",
]
