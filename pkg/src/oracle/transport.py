from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from errors import ConvergenceFailure, InvalidArgument
from geometry import cost

from .grid_dual import Grid

MARGINAL_TOL = 1e-10
MAX_ITERS = 100_000


class EntropicCoupling(NamedTuple):
    value: float
    plan: np.ndarray
    rows: np.ndarray
    cols: np.ndarray


def _distribution(weights, size: int, name: str) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (size,) or np.any(weights < 0):
        raise InvalidArgument(f"{name} must hold {size} nonnegative masses")
    if not np.isclose(weights.sum(), 1.0, rtol=0, atol=1e-9):
        raise InvalidArgument(f"{name} masses sum to {weights.sum()}, not 1")
    return weights / weights.sum()


def entropic_coupling(p_weights, q_weights, grid: Grid, delta: float, sigma: float) -> EntropicCoupling:
    """Entropic transport between two distributions on a grid.

    Minimizes E[c] + delta * KL(pi | p(i) pi_sigma(j|i)) over couplings with
    marginals p and q, where pi_sigma(j|i) is the Gaussian reference kernel
    normalized over the whole grid. Solved by log-domain Sinkhorn scaling
    restricted to the supports of p and q, which `rows` and `cols` index.
    """
    if delta <= 0 or sigma <= 0:
        raise InvalidArgument(f"delta and sigma must be positive, got {delta} and {sigma}")
    size = len(grid)
    p = _distribution(p_weights, size, "P")
    q = _distribution(q_weights, size, "Q")

    costs = cost(grid.points[:, None, :], grid.points[None, :, :])
    log_reference = -costs / sigma**2
    log_reference -= logsumexp(log_reference, axis=1, keepdims=True)

    rows, cols = np.flatnonzero(p > 0), np.flatnonzero(q > 0)
    costs = costs[np.ix_(rows, cols)]
    log_reference = np.log(p[rows])[:, None] + log_reference[np.ix_(rows, cols)]
    log_kernel = log_reference - costs / delta
    log_p, log_q = np.log(p[rows]), np.log(q[cols])

    f = np.zeros(len(rows))
    g = np.zeros(len(cols))
    for _ in range(MAX_ITERS):
        f = log_p - logsumexp(log_kernel + g[None, :], axis=1)
        g = log_q - logsumexp(log_kernel + f[:, None], axis=0)
        log_plan = f[:, None] + log_kernel + g[None, :]
        residual = 0.5 * np.abs(np.exp(logsumexp(log_plan, axis=1)) - p[rows]).sum()
        if residual < MARGINAL_TOL:
            break
    else:
        raise ConvergenceFailure(
            f"Sinkhorn marginals off by {residual:.2e} after {MAX_ITERS} iterations"
        )

    plan = np.exp(log_plan)
    entropy = np.sum(plan * (log_plan - log_reference))
    value = max(float(np.sum(plan * costs) + delta * entropy), 0.0)
    return EntropicCoupling(value, plan, rows, cols)


def reg_wass_sq(p_weights, q_weights, grid: Grid, delta: float, sigma: float) -> float:
    return entropic_coupling(p_weights, q_weights, grid, delta, sigma).value


def wass_sq_1d(x_points, p_weights, y_points, q_weights) -> float:
    """Optimal transport cost 1/2 |x - y|^2 between 1-D discrete distributions,
    from the monotone (sorted) coupling"""
    x_points, y_points = np.ravel(x_points), np.ravel(y_points)
    p = np.asarray(p_weights, dtype=float)
    q = np.asarray(q_weights, dtype=float)
    p, q = p / p.sum(), q / q.sum()

    xs, ys = np.argsort(x_points), np.argsort(y_points)
    x_sorted, y_sorted = x_points[xs], y_points[ys]
    p_cum, q_cum = np.cumsum(p[xs]), np.cumsum(q[ys])

    levels = np.unique(np.clip(np.concatenate([p_cum, q_cum]), 0, 1))
    masses = np.diff(levels, prepend=0.0)
    middles = levels - masses / 2
    i = np.minimum(np.searchsorted(p_cum, middles), len(x_sorted) - 1)
    j = np.minimum(np.searchsorted(q_cum, middles), len(y_sorted) - 1)
    return float(np.sum(masses * 0.5 * (x_sorted[i] - y_sorted[j]) ** 2))


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
