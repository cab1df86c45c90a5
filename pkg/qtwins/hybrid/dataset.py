"""Synthetic cubic regression data: y = x^3 + Normal(0, sigma^2)."""

import csv
import io
import json
import logging
from pathlib import Path

import numpy as np

from .models import Dataset

logger = logging.getLogger(__name__)

TRUE_FUNCTIONS = {
    "cubic": lambda x: np.asarray(x, dtype=float) ** 3,
}


class DatasetError(ValueError):
    """Raised for invalid dataset parameters or files."""


def true_function(dataset: Dataset, x) -> np.ndarray:
    """Evaluate the noiseless generating function of a dataset."""
    try:
        fn = TRUE_FUNCTIONS[dataset.true_function]
    except KeyError:
        raise DatasetError(f"unknown true function '{dataset.true_function}'")
    return fn(x)


def generate_dataset(
    n: int = 20,
    domain: tuple[float, float] = (-4.0, 4.0),
    noise_sigma: float = 3.0,
    seed: int = 0,
) -> Dataset:
    """Draw x uniformly on the domain and y = x^3 + noise.

    Args:
        n: Number of points
        domain: (a, b) with a < b
        noise_sigma: Standard deviation of the additive Gaussian noise
        seed: RNG seed

    Returns:
        Dataset with scales (max|x|, max|y|)
    """
    a, b = domain
    if n < 1:
        raise DatasetError(f"need at least one point, got {n}")
    if not a < b:
        raise DatasetError(f"invalid domain [{a}, {b}]")
    if noise_sigma < 0:
        raise DatasetError(f"noise_sigma must be >= 0, got {noise_sigma}")

    rng = np.random.default_rng(seed)
    x = rng.uniform(a, b, size=n)
    y = x**3 + rng.normal(0.0, noise_sigma, size=n)
    x_scale = float(np.max(np.abs(x))) or 1.0
    y_scale = float(np.max(np.abs(y))) or 1.0
    logger.debug(f"Generated {n} cubic points on [{a}, {b}] with sigma={noise_sigma}, seed={seed}")
    return Dataset(
        x=x.tolist(),
        y=y.tolist(),
        x_scale=x_scale,
        y_scale=y_scale,
        noise_sigma=noise_sigma,
        domain=(a, b),
        seed=seed,
    )


def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y"])
    writer.writerows(zip(dataset.x, dataset.y, strict=True))
    return buf.getvalue()


def save_dataset(dataset: Dataset, csv_path: Path) -> Path:
    """Write ``x,y`` CSV plus a JSON sidecar with scales and generator settings."""
    csv_path = Path(csv_path)
    csv_path.write_text(dataset_to_csv(dataset))
    sidecar = csv_path.with_suffix(".json")
    meta = dataset.model_dump(mode="json", exclude={"x", "y"})
    sidecar.write_text(json.dumps(meta, indent=2) + "\n")
    return sidecar


def load_dataset(csv_path: Path) -> Dataset:
    """Read a dataset written by :func:`save_dataset`."""
    csv_path = Path(csv_path)
    try:
        rows = list(csv.DictReader(io.StringIO(csv_path.read_text())))
        meta = json.loads(csv_path.with_suffix(".json").read_text())
        return Dataset(x=[float(r["x"]) for r in rows], y=[float(r["y"]) for r in rows], **meta)
    except (OSError, KeyError, ValueError) as e:
        raise DatasetError(f"cannot load dataset {csv_path}: {e}")
