from dataclasses import dataclass
from typing import Self

import numpy as np

from errors import InvalidArgument
from geometry import SampleSpace, cost
from models import LossModel

MAX_GRID = 100_000


@dataclass(frozen=True, eq=False)
class Grid:
    """Finite support inside the sample space, optionally with reference masses"""

    points: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.size == 0:
            raise InvalidArgument(f"Grid needs at least one point, got shape {self.points.shape}")
        if self.weights is not None:
            if self.weights.shape != (len(self.points),) or np.any(self.weights <= 0):
                raise InvalidArgument("Grid weights must be positive, one per point")

    @classmethod
    def from_points(cls, points, weights=None) -> Self:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
        return cls(points, weights)

    @classmethod
    def regular(cls, space: SampleSpace, resolution: int, extra=None) -> Self:
        """Probe grid of the space, plus extra points such as the data"""
        points = space.probe_grid(resolution)
        if extra is not None:
            points = np.concatenate([points, np.atleast_2d(space.check(extra))])
        return cls(points)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class GridDualResult:
    value: float
    lambda_star: float


def _envelope_breaks(losses: np.ndarray, costs: np.ndarray):
    """Breakpoints of lam -> max_j (losses_j - lam * costs_j) on lam >= 0.

    Returns the cost of the active line at lam=0+ and a list of
    (lam, old cost, new cost) events.
    """
    top = losses.max()
    active = np.flatnonzero(losses == top)
    current = active[np.argmin(costs[active])]
    start_cost = costs[current]

    events = []
    while True:
        cheaper = costs < costs[current]
        if not cheaper.any():
            return start_cost, events
        crossing = np.full(costs.shape, np.inf)
        crossing[cheaper] = (losses[current] - losses[cheaper]) / (costs[current] - costs[cheaper])
        lam = crossing.min()
        ties = np.flatnonzero(crossing == lam)
        following = ties[np.argmin(costs[ties])]
        events.append((float(lam), costs[current], costs[following]))
        current = following


def grid_dual_values(losses, costs, rho: float) -> GridDualResult:
    """Exact minimum of lam * rho^2 + mean_i max_j (losses_j - lam * costs_ij).

    The objective is convex and piecewise linear in lam, so the minimizer is
    the first breakpoint where the right slope turns nonnegative.
    """
    losses = np.asarray(losses, dtype=float)
    costs = np.atleast_2d(np.asarray(costs, dtype=float))
    if losses.size == 0:
        raise InvalidArgument("Grid must not be empty")
    if costs.shape[1] != losses.size:
        raise InvalidArgument(f"Cost table {costs.shape} does not match {losses.size} losses")

    active = np.empty(len(costs))
    events = []
    for i, row in enumerate(costs):
        active[i], row_events = _envelope_breaks(losses, row)
        events.extend((lam, i, new) for lam, _, new in row_events)

    lam_star = 0.0
    if rho**2 < active.mean():
        events.sort(key=lambda event: event[0])
        for lam, i, new in events:
            active[i] = new
            # mean of the active costs, not a running sum, so rho=0 terminates exactly
            if rho**2 >= active.mean():
                lam_star = lam
                break
        else:
            raise InvalidArgument(
                f"rho={rho} cannot reach the grid from the data: infeasible grid problem"
            )

    value = lam_star * rho**2 + float(np.mean(np.max(losses - lam_star * costs, axis=1)))
    return GridDualResult(value=value, lambda_star=lam_star)


def grid_dual_exact(model: LossModel, dataset, rho: float, grid: Grid) -> GridDualResult:
    data = np.atleast_2d(np.asarray(dataset, dtype=float))
    if len(grid) > MAX_GRID:
        raise InvalidArgument(f"Grid of {len(grid)} points exceeds {MAX_GRID}")
    costs = cost(data[:, None, :], grid.points[None, :, :])
    return grid_dual_values(model.value(grid.points), costs, rho)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
