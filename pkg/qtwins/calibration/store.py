"""Timestamp-versioned snapshot store.

Layout: ``<store>/<backend>/<YYYY-MM-DDThh:mm:ssZ>.json``, one canonical JSON
file per calibration instant. Reads may run concurrently; writes to the same
key must be serialized by the caller.
"""

import logging
import os
import tempfile
from datetime import datetime
from pathlib import Path

from .models import (
    BACKEND_NAME,
    CalibrationSnapshot,
    SnapshotFormat,
    SnapshotKey,
    TimestampSelector,
    check_backend_name,
    format_timestamp,
    parse_timestamp,
)
from .parser import parse_snapshot, serialize_snapshot

logger = logging.getLogger(__name__)


class SnapshotConflictError(Exception):
    """Raised when a key is re-stored with different content."""


class SnapshotNotFoundError(LookupError):
    """Raised when no stored snapshot matches a query."""


class SnapshotStore:
    """Filesystem store of calibration snapshots keyed by (backend, timestamp)."""

    def __init__(self, root: Path):
        self.root = Path(root)

    def path_for(self, key: SnapshotKey) -> Path:
        return self.root / key.backend_name / f"{format_timestamp(key.timestamp)}.json"

    def store(self, snapshot: CalibrationSnapshot) -> SnapshotKey:
        """Persist a snapshot; identical re-stores are idempotent.

        Raises:
            SnapshotConflictError: the key exists with different content
            OSError: the store is not writable
        """
        key = snapshot.key
        path = self.path_for(key)
        data = serialize_snapshot(snapshot)

        if path.exists():
            if path.read_bytes() == data:
                logger.debug(f"Snapshot {key} already stored, content identical")
                return key
            raise SnapshotConflictError(f"snapshot {key} already stored with different content")

        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp_name, path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
        logger.info(f"Stored snapshot {key} ({snapshot.num_qubits} qubits) at {path}")
        return key

    def timestamps(self, backend_name: str) -> list[datetime]:
        """All stored calibration instants of a backend, oldest first.

        Only files named in the canonical timestamp form count as snapshots.
        """
        backend_dir = self.root / check_backend_name(backend_name)
        if not backend_dir.is_dir():
            return []
        found = []
        for path in backend_dir.glob("*.json"):
            try:
                instant = parse_timestamp(path.stem)
            except ValueError:
                instant = None
            if instant is None or format_timestamp(instant) != path.stem:
                logger.debug(f"Skipping non-snapshot file {path}")
                continue
            found.append(instant)
        return sorted(found)

    def backends(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.name for p in self.root.iterdir() if p.is_dir() and BACKEND_NAME.fullmatch(p.name))

    def keys(self, backend_name: str | None = None) -> list[SnapshotKey]:
        """Stored keys, by backend then timestamp."""
        names = [backend_name] if backend_name else self.backends()
        return [SnapshotKey(backend_name=name, timestamp=ts) for name in names for ts in self.timestamps(name)]

    def load(
        self,
        backend_name: str,
        timestamp: str | datetime,
        selector: TimestampSelector | str = TimestampSelector.EXACT,
    ) -> CalibrationSnapshot:
        """Load a snapshot by exact key or as the newest one at or before an instant.

        Raises:
            SnapshotNotFoundError: nothing matches
        """
        selector = TimestampSelector(selector)
        instant = parse_timestamp(timestamp)

        if selector is TimestampSelector.EXACT:
            chosen = instant
        else:
            candidates = [ts for ts in self.timestamps(backend_name) if ts <= instant]
            if not candidates:
                raise SnapshotNotFoundError(
                    f"no {backend_name} snapshot at or before {format_timestamp(instant)} in {self.root}"
                )
            chosen = candidates[-1]

        path = self.path_for(SnapshotKey(backend_name=backend_name, timestamp=chosen))
        if not path.exists():
            raise SnapshotNotFoundError(f"no {backend_name} snapshot at {format_timestamp(chosen)} in {self.root}")
        snapshot = parse_snapshot(path.read_bytes(), SnapshotFormat.CANONICAL_JSON)
        logger.debug(f"Loaded snapshot {snapshot.key} from {path}")
        return snapshot

    def load_key(self, key: SnapshotKey) -> CalibrationSnapshot:
        return self.load(key.backend_name, key.timestamp, TimestampSelector.EXACT)


def store_snapshot(store_path: Path, snapshot: CalibrationSnapshot) -> SnapshotKey:
    """Persist a snapshot under (backend, timestamp)."""
    return SnapshotStore(store_path).store(snapshot)


def load_snapshot(
    store_path: Path,
    backend_name: str,
    timestamp: str | datetime,
    selector: TimestampSelector | str = TimestampSelector.EXACT,
) -> CalibrationSnapshot:
    """Load a snapshot from a store directory."""
    return SnapshotStore(store_path).load(backend_name, timestamp, selector)


def list_snapshots(store_path: Path, backend_name: str | None = None) -> list[SnapshotKey]:
    """Keys of every stored snapshot, optionally for one backend."""
    return SnapshotStore(store_path).keys(backend_name)
