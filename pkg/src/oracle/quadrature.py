import math

import numpy as np
from scipy.special import logsumexp, softmax

from dual_gen import DualParams
from errors import ConvergenceFailure, InvalidArgument, Unimplemented
from geometry import SampleSpace, cost
from models import LossModel

START_RESOLUTION = 64
MAX_RESOLUTION = {1: 2**16, 2: 2**10}
REFINE_TOL = 1e-6
TAIL_LOG = 40.0


def _window(space: SampleSpace, xi: np.ndarray, precision: float, tilt: float):
    """Box around xi outside of which a Gaussian of the given precision, tilted
    by a slope of at most `tilt`, is below e^-40 of its peak"""
    lo, hi = space.bounding_box
    if math.isfinite(tilt):
        half = (tilt + math.sqrt(tilt**2 + 2 * TAIL_LOG * precision)) / precision
        lo, hi = np.maximum(lo, xi - half), np.minimum(hi, xi + half)
    return lo, hi


def _cells(space: SampleSpace, lo, hi, resolution: int):
    """Midpoints of a tensor grid on [lo, hi] inside the space, and the log-volume of one cell"""
    axes = [a + (np.arange(resolution) + 0.5) * (b - a) / resolution for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    cells = np.stack([m.ravel() for m in mesh], axis=-1)
    log_volume = float(np.sum(np.log((hi - lo) / resolution)))
    return cells[space.contains(cells)], log_volume


def _log_reference_mass(space, xi, params, resolution) -> float:
    lo, hi = _window(space, xi, 1 / params.sigma**2, 0.0)
    cells, log_volume = _cells(space, lo, hi, resolution)
    return logsumexp(-cost(xi, cells) / params.sigma**2) + log_volume


def _tilted_cells(model, space, xi, params, resolution):
    """Cells around xi with their transport costs and tilted log-masses"""
    precision = params.lam / params.eps + 1 / params.sigma**2
    lo, hi = _window(space, xi, precision, model.grad_bound(space) / params.eps)
    cells, log_volume = _cells(space, lo, hi, resolution)
    transport = cost(xi, cells)
    tilted = (model.value(cells) - params.lam * transport) / params.eps
    tilted -= transport / params.sigma**2
    return transport, tilted, log_volume


def _refine(evaluate, dims: int, resolution: int | None):
    if dims > 2:
        raise Unimplemented(f"Quadrature is limited to d <= 2, got d={dims}")
    resolution = resolution or START_RESOLUTION
    previous = current = evaluate(resolution)
    while resolution < MAX_RESOLUTION[dims]:
        resolution *= 2
        current = evaluate(resolution)
        if abs(current - previous) < REFINE_TOL:
            return current
        previous = current
    raise ConvergenceFailure(
        f"Quadrature still moving by {abs(current - previous):.2e} at {resolution} cells per axis"
    )


def _check(space: SampleSpace, xi, params: DualParams) -> np.ndarray:
    if not params.regularized:
        raise InvalidArgument("Quadrature of the dual generator needs eps > 0")
    xi = space.check(xi)
    if xi.ndim != 1:
        raise InvalidArgument(f"Expected a single point, got shape {xi.shape}")
    return xi


def phi_quadrature(
    model: LossModel,
    space: SampleSpace,
    xi,
    params: DualParams,
    resolution: int | None = None,
) -> float:
    """Deterministic dual generator for d <= 2 by tensor midpoint quadrature,
    refined by doubling until successive values agree"""
    xi = _check(space, xi, params)

    def evaluate(cells_per_axis):
        _, tilted, log_volume = _tilted_cells(model, space, xi, params, cells_per_axis)
        log_mass = logsumexp(tilted) + log_volume
        return params.eps * (log_mass - _log_reference_mass(space, xi, params, cells_per_axis))

    return _refine(evaluate, space.dims, resolution)


def gibbs_cost_quadrature(
    model: LossModel,
    space: SampleSpace,
    xi,
    params: DualParams,
    resolution: int | None = None,
) -> float:
    """Expected transport cost from xi under the tilted reference measure"""
    xi = _check(space, xi, params)

    def evaluate(cells_per_axis):
        transport, tilted, _ = _tilted_cells(model, space, xi, params, cells_per_axis)
        return float(softmax(tilted) @ transport)

    return _refine(evaluate, space.dims, resolution)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
