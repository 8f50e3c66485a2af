from dataclasses import dataclass
from typing import Callable

import numpy as np

from errors import NumericFailure

MIN_STEP = 1e-20
MAX_STEP = 1e8
ARMIJO = 1e-4

RowFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AscentResult:
    points: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    iterations: int


def _row_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", a, b)


def projected_ascent(
    objective: RowFunction,
    gradient: RowFunction,
    project: Callable[[np.ndarray], np.ndarray],
    starts: np.ndarray,
    step: float = 1.0,
    tol: float = 1e-8,
    max_iters: int = 500,
) -> AscentResult:
    """Projected gradient ascent with Armijo backtracking, one problem per row.

    objective and gradient receive the current points together with the row
    indices they belong to, so each row may carry its own data.
    """
    x = project(np.array(starts, dtype=float))
    rows = np.arange(len(x))
    fx = objective(x, rows)
    grad = gradient(x, rows)
    if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(grad))):
        raise NumericFailure("Non-finite loss at the ascent starting points")

    steps = np.full(len(x), float(step))
    residual = np.linalg.norm(project(x + grad) - x, axis=1)
    active = residual > tol

    iterations = 0
    while active.any() and iterations < max_iters:
        iterations += 1
        idx = np.nonzero(active)[0]
        candidates = project(x[idx] + steps[idx, None] * grad[idx])
        values = objective(candidates, idx)
        if not np.all(np.isfinite(values)):
            raise NumericFailure("Non-finite loss during projected ascent")

        increase = _row_dot(grad[idx], candidates - x[idx])
        accepted = values >= fx[idx] + ARMIJO * increase
        moved, stayed = idx[accepted], idx[~accepted]

        x[moved] = candidates[accepted]
        fx[moved] = values[accepted]
        grad[moved] = gradient(x[moved], moved)
        if not np.all(np.isfinite(grad[moved])):
            raise NumericFailure("Non-finite gradient during projected ascent")
        steps[moved] = np.minimum(steps[moved] * 2, MAX_STEP)
        steps[stayed] *= 0.5

        residual[idx] = np.linalg.norm(project(x[idx] + grad[idx]) - x[idx], axis=1)
        active[idx] = (residual[idx] > tol) & (steps[idx] > MIN_STEP)

    return AscentResult(
        points=x,
        values=fx,
        converged=residual <= tol,
        iterations=iterations,
    )


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
