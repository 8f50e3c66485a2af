import math
import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.optimize import isotonic_regression

from errors import ConfigError
from records import Serializable
from streams import Purpose, stream

from .config import Config
from .coverage import coverage_rows
from .reports import frame


class ScalingRow(Serializable):
    n: int
    rho_star: float
    censored: int
    rho_star_monotone: float


class ScalingFit(Serializable):
    slope: float
    intercept: float
    slope_lo: float
    slope_hi: float
    fit_available: bool
    points: int


@dataclass(frozen=True)
class ScalingReport:
    rows: pd.DataFrame
    coverage: pd.DataFrame
    fit: ScalingFit


def smoothed_coverage(coverage) -> np.ndarray:
    """Closest coverage curve that does not decrease with the radius"""
    coverage = np.asarray(coverage, dtype=float)
    known = ~np.isnan(coverage)
    smoothed = np.full(coverage.shape, np.nan)
    if known.any():
        smoothed[known] = isotonic_regression(coverage[known], increasing=True).x
    return smoothed


def rho_star(rho_grid, coverage, target: float) -> float:
    """Smallest radius whose smoothed coverage reaches the target, nan when censored"""
    reached = np.flatnonzero(smoothed_coverage(coverage) >= target)
    return float(rho_grid[reached[0]]) if reached.size else math.nan


def fit_power_law(sizes, radii) -> tuple[float, float] | None:
    """Least squares line through (log n, log rho*), skipping censored sizes"""
    sizes, radii = np.asarray(sizes, dtype=float), np.asarray(radii, dtype=float)
    kept = ~np.isnan(radii)
    if kept.sum() < 2:
        return None
    slope, intercept = np.polyfit(np.log(sizes[kept]), np.log(radii[kept]), 1)
    return float(slope), float(intercept)


def _hits(rows: pd.DataFrame, sizes, rho_grid, replicates) -> np.ndarray:
    """covered flags as a (size, rho, replicate) cube, nan where a replicate failed"""
    cube = np.full((len(sizes), len(rho_grid), len(replicates)), np.nan)
    position = {replicate: k for k, replicate in enumerate(replicates)}
    for row in rows[rows["status"] == "ok"].itertuples(index=False):
        i, j = sizes.index(row.n), rho_grid.index(row.rho)
        cube[i, j, position[row.replicate]] = row.covered
    return cube


def _coverage(cube: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        # sizes where every replicate failed stay nan
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.nanmean(cube, axis=2)


def _radii(cube: np.ndarray, rho_grid, target: float) -> np.ndarray:
    coverage = _coverage(cube)
    return np.array([rho_star(rho_grid, curve, target) for curve in coverage])


async def run_scaling(config: Config, replicates: list[int] | None = None) -> ScalingReport:
    experiment = config.experiment
    sizes, rho_grid = list(experiment.n_grid), list(experiment.rho_grid)
    if len(sizes) < 4 or sizes[-1] < 10 * sizes[0]:
        raise ConfigError(f"Scaling needs at least 4 sizes spanning a decade, got {sizes}")

    replicates = list(replicates if replicates is not None else range(experiment.replicates))
    rows = frame(await coverage_rows(config, sizes, replicates))
    cube = _hits(rows, sizes, rho_grid, replicates)
    radii = _radii(cube, rho_grid, experiment.target_coverage)

    censored = np.isnan(radii)
    monotone = np.full(radii.shape, np.nan)
    if (~censored).any():
        monotone[~censored] = isotonic_regression(radii[~censored], increasing=False).x
    points = [
        ScalingRow(n=size, rho_star=radius, censored=int(flag), rho_star_monotone=smooth)
        for size, radius, flag, smooth in zip(sizes, radii, censored, monotone)
    ]

    fitted = fit_power_law(sizes, radii)
    slopes = []
    rng = stream(experiment.seed, Purpose.BOOTSTRAP)
    for _ in range(experiment.bootstrap):
        resampled = cube[:, :, rng.integers(len(replicates), size=len(replicates))]
        refit = fit_power_law(sizes, _radii(resampled, rho_grid, experiment.target_coverage))
        if refit is not None:
            slopes.append(refit[0])

    slope, intercept = fitted if fitted is not None else (math.nan, math.nan)
    slope_lo, slope_hi = np.percentile(slopes, [2.5, 97.5]) if slopes else (math.nan, math.nan)
    fit = ScalingFit(
        slope=slope,
        intercept=intercept,
        slope_lo=float(slope_lo),
        slope_hi=float(slope_hi),
        fit_available=fitted is not None,
        points=int((~censored).sum()),
    )

    coverage = _coverage(cube)
    table = pd.DataFrame(
        [
            dict(n=size, rho=rho, coverage=coverage[i, j], coverage_monotone=smooth)
            for i, size in enumerate(sizes)
            for j, (rho, smooth) in enumerate(zip(rho_grid, smoothed_coverage(coverage[i])))
        ]
    )
    return ScalingReport(rows=frame(points), coverage=table, fit=fit)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
