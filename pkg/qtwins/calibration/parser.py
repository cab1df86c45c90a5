"""Calibration snapshot parsing and canonical serialization.

Two input formats are supported:

- canonical JSON (source of truth, round-trips bit-exactly)::

    {"backend": "ibm_sherbrooke", "timestamp": "2024-05-01T00:00:00Z",
     "qubits": [{"id": 0, "t1_us": 250.1, "t2_us": 180.4,
                 "prob_meas1_prep0": 0.012, "prob_meas0_prep1": 0.018}],
     "gates": [{"name": "sx", "qubits": [0], "duration_ns": 56.888, "error": 2.1e-4}]}

- IBM-style calibration CSV exports (one row per qubit, two-qubit gate
  errors and gate times packed as ``"0_1:0.0071;0_14:0.0093"``).
"""

import csv
import io
import json
import logging
import math
import re
from datetime import datetime
from pathlib import Path

from config import settings
from pydantic import ValidationError

from .models import (
    CalibrationSnapshot,
    GateRecord,
    ParseResult,
    QubitRecord,
    SnapshotFormat,
    parse_timestamp,
)

logger = logging.getLogger(__name__)

QUBIT_FIELDS = {"id", "t1_us", "t2_us", "prob_meas1_prep0", "prob_meas0_prep1"}
GATE_FIELDS = {"name", "qubits", "duration_ns", "error"}
SNAPSHOT_FIELDS = {"backend", "timestamp", "qubits", "gates"}

# CSV column (lowercased, whitespace-collapsed) -> single-qubit gate name
CSV_SINGLE_QUBIT_ERRORS = {
    "id error": "id",
    "√x (sx) error": "sx",
    "sx error": "sx",
    "pauli-x error": "x",
    "single-qubit pauli-x error": "x",
    "x error": "x",
    "z-axis rotation (rz) error": "rz",
    "rz error": "rz",
}
# CSV column -> two-qubit gate name
CSV_TWO_QUBIT_ERRORS = {
    "ecr error": "ecr",
    "cz error": "cz",
    "cnot error": "cx",
}
CSV_QUBIT_COLUMNS = {
    "qubit": "id",
    "t1 (us)": "t1_us",
    "t2 (us)": "t2_us",
    "prob meas1 prep0": "prob_meas1_prep0",
    "prob meas0 prep1": "prob_meas0_prep1",
}
CSV_GATE_TIME = "gate time (ns)"
VIRTUAL_GATES = {"rz"}

# e.g. ibm_sherbrooke_calibrations_2024-05-20T13_11_53Z.csv
CSV_FILENAME = re.compile(r"^(?P<backend>.+?)_calibrations_(?P<ts>\d{4}-\d{2}-\d{2}T\d{2}_\d{2}_\d{2}Z)")


class SnapshotParseError(ValueError):
    """Raised when calibration input is malformed or violates an invariant."""

    def __init__(self, message: str, qubit_id: int | None = None, field: str | None = None):
        super().__init__(message)
        self.qubit_id = qubit_id
        self.field = field


def _first_error(exc: ValidationError) -> tuple[str | None, str]:
    """Return (field name, message) of the first pydantic error."""
    err = exc.errors()[0]
    loc = [str(part) for part in err.get("loc", ())]
    field = loc[0] if loc else None
    return field, err.get("msg", str(exc))


def _parse_qubit(raw: object, index: int) -> QubitRecord:
    if not isinstance(raw, dict):
        raise SnapshotParseError(f"qubit entry {index} is not an object")
    qubit_id = raw.get("id", index)
    try:
        return QubitRecord.model_validate(raw)
    except ValidationError as e:
        field, msg = _first_error(e)
        raise SnapshotParseError(f"qubit {qubit_id}: field '{field}': {msg}", qubit_id=qubit_id, field=field)


def _parse_gate(raw: object, index: int) -> GateRecord:
    if not isinstance(raw, dict):
        raise SnapshotParseError(f"gate entry {index} is not an object")
    try:
        return GateRecord.model_validate(raw)
    except ValidationError as e:
        field, msg = _first_error(e)
        name = raw.get("name", f"#{index}")
        raise SnapshotParseError(f"gate {name}{raw.get('qubits', '')}: field '{field}': {msg}", field=field)


def _build_snapshot(backend: object, timestamp: object, qubits: list, gates: list) -> CalibrationSnapshot:
    if not qubits:
        raise SnapshotParseError("empty qubit list", field="qubits")
    if not isinstance(backend, str):
        raise SnapshotParseError("missing mandatory field 'backend'", field="backend")
    if timestamp is None:
        raise SnapshotParseError("missing mandatory field 'timestamp'", field="timestamp")
    try:
        parse_timestamp(timestamp)
    except (TypeError, ValueError) as e:
        raise SnapshotParseError(f"field 'timestamp': cannot parse {timestamp!r}: {e}", field="timestamp")
    try:
        return CalibrationSnapshot(backend=backend, timestamp=timestamp, qubits=qubits, gates=gates)
    except ValidationError as e:
        field, msg = _first_error(e)
        raise SnapshotParseError(f"snapshot: {msg}", field=field)


def _parse_canonical_json(raw: bytes) -> ParseResult:
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SnapshotParseError(f"malformed JSON: {e}")
    if not isinstance(data, dict):
        raise SnapshotParseError("snapshot JSON must be an object")

    warnings: list[str] = []
    for key in sorted(set(data) - SNAPSHOT_FIELDS):
        warnings.append(f"ignored unknown snapshot field '{key}'")

    for field in ("backend", "timestamp", "qubits"):
        if field not in data:
            raise SnapshotParseError(f"missing mandatory field '{field}'", field=field)
    raw_qubits = data["qubits"]
    raw_gates = data.get("gates", [])
    if not isinstance(raw_qubits, list) or not isinstance(raw_gates, list):
        raise SnapshotParseError("'qubits' and 'gates' must be lists")

    qubits = []
    for i, raw_qubit in enumerate(raw_qubits):
        qubits.append(_parse_qubit(raw_qubit, i))
        for key in sorted(set(raw_qubit) - QUBIT_FIELDS):
            warnings.append(f"qubit {raw_qubit.get('id', i)}: ignored unknown field '{key}'")

    gates = []
    for i, raw_gate in enumerate(raw_gates):
        gates.append(_parse_gate(raw_gate, i))
        for key in sorted(set(raw_gate) - GATE_FIELDS):
            warnings.append(f"gate {raw_gate.get('name', i)}: ignored unknown field '{key}'")

    snapshot = _build_snapshot(data["backend"], data["timestamp"], qubits, gates)
    return ParseResult(snapshot=snapshot, warnings=warnings)


def _normalize_column(name: str) -> str:
    return " ".join(name.strip().lower().split())


def _csv_float(value: str | None) -> float | None:
    if value is None:
        return None
    value = value.strip()
    if not value:
        return None
    try:
        parsed = float(value)
    except ValueError:
        return None
    return None if math.isnan(parsed) else parsed


def _parse_packed(value: str | None, column: str, line_no: int) -> dict[tuple[int, int], float]:
    """Parse ``"0_1:0.0071;0_14:0.0093"`` into {(0, 1): 0.0071, (0, 14): 0.0093}."""
    entries: dict[tuple[int, int], float] = {}
    if not value:
        return entries
    for item in value.split(";"):
        item = item.strip()
        if not item:
            continue
        pair, sep, number = item.partition(":")
        a, sep2, b = (part.strip() for part in pair.partition("_"))
        parsed = _csv_float(number)
        if not sep or not sep2 or parsed is None or not a.isdigit() or not b.isdigit():
            raise SnapshotParseError(
                f"line {line_no}: field '{column}': malformed packed gate entry {item!r}", field=column
            )
        entries[(int(a), int(b))] = parsed
    return entries


def infer_csv_provenance(path: str | Path) -> tuple[str, str] | None:
    """Infer (backend, timestamp) from an IBM calibration export file name."""
    match = CSV_FILENAME.match(Path(path).name)
    if not match:
        return None
    date, time = match.group("ts").rstrip("Z").split("T")
    return match.group("backend"), f"{date}T{time.replace('_', ':')}Z"


def _parse_calibration_csv(raw: bytes, backend_name: str | None, timestamp: str | datetime | None) -> ParseResult:
    if backend_name is None or timestamp is None:
        raise SnapshotParseError("CSV input needs a backend name and a timestamp", field="backend")
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise SnapshotParseError(f"malformed CSV: {e}")

    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames:
        raise SnapshotParseError("malformed CSV: missing header row")
    columns = {_normalize_column(name): name for name in reader.fieldnames}
    for required in CSV_QUBIT_COLUMNS:
        if required not in columns:
            raise SnapshotParseError(f"missing mandatory column '{required}'", field=CSV_QUBIT_COLUMNS[required])

    known = set(CSV_QUBIT_COLUMNS) | set(CSV_SINGLE_QUBIT_ERRORS) | set(CSV_TWO_QUBIT_ERRORS) | {CSV_GATE_TIME}
    warnings = [f"ignored unknown column '{columns[c]}'" for c in sorted(set(columns) - known)]

    qubits: list[QubitRecord] = []
    gates: dict[tuple[str, tuple[int, ...]], GateRecord] = {}
    single_ns = settings.default_single_qubit_gate_ns

    for line_no, row in enumerate(reader, start=2):
        values = {CSV_QUBIT_COLUMNS[c]: row.get(columns[c]) for c in CSV_QUBIT_COLUMNS}
        id_text = (values["id"] or "").strip()
        if not id_text.isdigit():
            raise SnapshotParseError(f"line {line_no}: field 'id': not a qubit index: {id_text!r}", field="id")
        qubit_id = int(id_text)
        record = {"id": qubit_id}
        for key in ("t1_us", "t2_us", "prob_meas1_prep0", "prob_meas0_prep1"):
            parsed = _csv_float(values[key])
            if parsed is None:
                raise SnapshotParseError(
                    f"qubit {qubit_id}: missing mandatory field '{key}'", qubit_id=qubit_id, field=key
                )
            record[key] = parsed
        qubits.append(_parse_qubit(record, qubit_id))

        for column, gate_name in CSV_SINGLE_QUBIT_ERRORS.items():
            if column not in columns:
                continue
            error = _csv_float(row.get(columns[column]))
            if error is None:
                continue
            duration = 0.0 if gate_name in VIRTUAL_GATES else single_ns
            gate = _parse_gate(
                {"name": gate_name, "qubits": [qubit_id], "duration_ns": duration, "error": error}, len(gates)
            )
            gates.setdefault((gate_name, (qubit_id,)), gate)

        durations = {}
        if CSV_GATE_TIME in columns:
            durations = _parse_packed(row.get(columns[CSV_GATE_TIME]), columns[CSV_GATE_TIME], line_no)
        for column, gate_name in CSV_TWO_QUBIT_ERRORS.items():
            if column not in columns:
                continue
            for pair, error in _parse_packed(row.get(columns[column]), columns[column], line_no).items():
                if (gate_name, pair) in gates:
                    continue
                duration = durations.get(pair)
                if duration is None:
                    warnings.append(f"{gate_name}{list(pair)}: no gate time, using 0 ns")
                    duration = 0.0
                gates[(gate_name, pair)] = _parse_gate(
                    {"name": gate_name, "qubits": list(pair), "duration_ns": duration, "error": error}, len(gates)
                )

    snapshot = _build_snapshot(backend_name, timestamp, qubits, list(gates.values()))
    return ParseResult(snapshot=snapshot, warnings=warnings)


def parse_snapshot_with_warnings(
    raw: bytes,
    fmt: SnapshotFormat | str = SnapshotFormat.CANONICAL_JSON,
    backend_name: str | None = None,
    timestamp: str | datetime | None = None,
) -> ParseResult:
    """Parse calibration data and keep the warning records.

    Args:
        raw: Input bytes
        fmt: Input format
        backend_name: Backend name (CSV only; JSON carries its own)
        timestamp: Calibration instant (CSV only)

    Returns:
        ParseResult with the validated snapshot and warning records

    Raises:
        SnapshotParseError: malformed input, missing field or invariant violation
    """
    fmt = SnapshotFormat(fmt)
    if fmt is SnapshotFormat.CANONICAL_JSON:
        return _parse_canonical_json(raw)
    return _parse_calibration_csv(raw, backend_name, timestamp)


def parse_snapshot(
    raw: bytes,
    fmt: SnapshotFormat | str = SnapshotFormat.CANONICAL_JSON,
    backend_name: str | None = None,
    timestamp: str | datetime | None = None,
) -> CalibrationSnapshot:
    """Parse calibration data into a validated snapshot, logging warning records."""
    result = parse_snapshot_with_warnings(raw, fmt, backend_name, timestamp)
    for warning in result.warnings:
        logger.warning(f"{result.snapshot.backend_name}: {warning}")
    logger.debug(
        f"Parsed {result.snapshot.backend_name} snapshot: {result.snapshot.num_qubits} qubits, "
        f"{len(result.snapshot.gates)} gates"
    )
    return result.snapshot


def serialize_snapshot(snapshot: CalibrationSnapshot) -> bytes:
    """Serialize a snapshot to canonical JSON bytes."""
    payload = snapshot.model_dump(mode="json", by_alias=True)
    return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
