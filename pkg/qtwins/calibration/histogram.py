"""Empirical distributions of calibration properties."""

import numpy as np

from .models import CalibrationSnapshot, Histogram, HistogramProperty, HistogramSummary


class PropertyUnavailableError(ValueError):
    """Raised when a snapshot has no records for the requested property."""


def property_values(snapshot: CalibrationSnapshot, prop: HistogramProperty | str) -> np.ndarray:
    """Collect the values of one property, one per contributing record."""
    prop = HistogramProperty(prop)
    if prop is HistogramProperty.T1:
        values = [q.t1 for q in snapshot.qubits]
    elif prop is HistogramProperty.T2:
        values = [q.t2 for q in snapshot.qubits]
    elif prop is HistogramProperty.READOUT_ERROR:
        values = [q.readout_error for q in snapshot.qubits]
    else:
        values = [g.error_rate for g in snapshot.gates]
    if not values:
        raise PropertyUnavailableError(f"snapshot {snapshot.key} has no records for property '{prop}'")
    return np.asarray(values, dtype=float)


def empirical_histogram(snapshot: CalibrationSnapshot, prop: HistogramProperty | str, bin_count: int) -> Histogram:
    """Equal-width histogram over [min, max] of a property.

    Bins are half-open [lo, hi) except the last, which is closed. For
    constant data np.histogram widens the range to [v - 0.5, v + 0.5].
    """
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    values = property_values(snapshot, prop)
    lo, hi = float(values.min()), float(values.max())
    counts, edges = np.histogram(values, bins=bin_count, range=(lo, hi))
    summary = HistogramSummary(
        count=int(values.size),
        mean=float(values.mean()),
        std=float(values.std()),
        min=lo,
        max=hi,
    )
    return Histogram(
        property_name=HistogramProperty(prop),
        bin_edges=[float(e) for e in edges],
        counts=[int(c) for c in counts],
        summary=summary,
    )
