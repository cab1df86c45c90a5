"""Ensemble predictions, uncertainty bands and their reports."""

import logging

import numpy as np
from hybrid import Dataset, LossMode, predict, true_function

from .models import Ensemble, MemberNoiseImpact, NoiseImpactReport, PredictionBand, UQReport

logger = logging.getLogger(__name__)


class UQReportError(ValueError):
    """The grid or dataset cannot separate in-domain from out-of-domain points."""


def aggregate_band(grid, member_means, member_variances=None) -> PredictionBand:
    """Combine per-member predictions into mean and std.

    Without variances: mean of members and their population std. With
    variances (gaussian-nll): mixture moments mu* = mean(mu_m) and
    var* = mean(var_m + mu_m^2) - mu*^2.
    """
    grid = np.asarray(grid, dtype=float)
    means = np.atleast_2d(np.asarray(member_means, dtype=float))
    center = means.mean(axis=0)
    if member_variances is None:
        std = means.std(axis=0)
        variances = None
    else:
        variances = np.atleast_2d(np.asarray(member_variances, dtype=float))
        mixture = (variances + means**2).mean(axis=0) - center**2
        std = np.sqrt(np.clip(mixture, 0.0, None))
    return PredictionBand(grid=grid, mean=center, std=std, members=means, member_variances=variances)


def predict_band(ensemble: Ensemble, grid) -> PredictionBand:
    """Evaluate every member on its own twin over the grid and aggregate."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("prediction grid is empty")
    means, variances = [], []
    for member in ensemble.members:
        mean, var = predict(member.model, grid, member.twin)
        means.append(mean)
        variances.append(var)
    nll = ensemble.config.loss is LossMode.GAUSSIAN_NLL
    band = aggregate_band(grid, means, variances if nll else None)
    logger.debug(f"Predicted band over {grid.size} points with {ensemble.size} members")
    return band


def uq_report(band: PredictionBand, dataset: Dataset) -> UQReport:
    """In-distribution RMSE against the true function plus mean std inside/outside the data range.

    Raises:
        UQReportError: training inputs span no interval, or the grid lies
            entirely inside or entirely outside it
    """
    lo, hi = min(dataset.x), max(dataset.x)
    if lo == hi:
        raise UQReportError("degenerate training domain: all training inputs are equal")
    inside = (band.grid >= lo) & (band.grid <= hi)
    if not inside.any():
        raise UQReportError(f"grid has no points inside the training domain [{lo}, {hi}]")
    if inside.all():
        raise UQReportError(f"grid has no points outside the training domain [{lo}, {hi}]")

    truth = true_function(dataset, band.grid[inside])
    rmse = float(np.sqrt(np.mean((band.mean[inside] - truth) ** 2)))
    return UQReport(
        in_distribution_rmse=rmse,
        mean_in_domain_std=float(band.std[inside].mean()),
        mean_out_of_domain_std=float(band.std[~inside].mean()),
        in_domain_points=int(inside.sum()),
        out_of_domain_points=int((~inside).sum()),
    )


def noise_impact(ensemble: Ensemble, grid) -> NoiseImpactReport:
    """Shift of each member's predictions on its twin versus a noiseless run of the same model."""
    grid = np.asarray(grid, dtype=float)
    rows = []
    for member in ensemble.members:
        noisy, _ = predict(member.model, grid, member.twin)
        clean, _ = predict(member.model, grid, None)
        shift = noisy - clean
        summary = member.twin.describe()
        rows.append(
            MemberNoiseImpact(
                member=member.index,
                twin_seed=member.twin.seed,
                rms_shift=float(np.sqrt(np.mean(shift**2))),
                max_shift=float(np.max(np.abs(shift))),
                mean_t1_us=summary.mean_t1,
                mean_t2_us=summary.mean_t2,
                two_qubit_error=summary.two_qubit_error,
            )
        )
        logger.debug(f"Member {member.index}: rms noise shift {rows[-1].rms_shift:.4g}")
    return NoiseImpactReport(members=rows)
