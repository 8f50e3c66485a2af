import numpy as np
from pydantic import BaseModel, Field

from dual_gen import MonteCarloBudget, ReferenceCache
from geometry import SampleSpace
from models import BoundsKind, LossModel
from records import Serializable

from .robust_risk import DualObjective, RobustRiskResult

ARMIJO = 1e-4
MIN_STEP = 1e-12


class OptBudget(BaseModel):
    max_iters: int = Field(200, ge=1)
    tol: float = Field(1e-6, gt=0)
    step: float = Field(1.0, gt=0)


class TrainResult(Serializable):
    theta: list[float]
    risk: RobustRiskResult
    iterations: int
    converged: bool


def train_robust(
    model: LossModel,
    space: SampleSpace,
    dataset,
    rho: float,
    eps: float = 0.0,
    sigma: float = 1.0,
    theta0=None,
    budget: MonteCarloBudget | None = None,
    opt: OptBudget | None = None,
    rng: np.random.Generator | None = None,
) -> TrainResult:
    """Projected gradient descent on the robust risk over the parameter set.

    lambda is re-solved at every iterate and the theta-gradient is taken by
    the envelope rule at that lambda. The same reference draws serve every
    iterate.
    """
    opt = opt or OptBudget()
    bounds = model.bounds
    theta = bounds.project(model.theta if theta0 is None else theta0)

    first = DualObjective.build(
        model.with_theta(theta), space, dataset, rho, eps, sigma, budget, rng
    )
    shared: ReferenceCache = first.cache

    def solve(theta, objective=None):
        objective = objective or DualObjective.build(
            model.with_theta(theta), space, dataset, rho, eps, sigma, first.budget, cache=shared
        )
        result = objective.minimize()
        return result, objective.theta_gradient(result.lambda_star)

    current, grad = solve(theta, first)
    if bounds.kind == BoundsKind.POINT:
        return TrainResult(theta=list(theta), risk=current, iterations=0, converged=True)

    step = opt.step
    for iteration in range(1, opt.max_iters + 1):
        residual = np.linalg.norm(bounds.project(theta - grad) - theta)
        if residual <= opt.tol:
            return TrainResult(
                theta=list(theta), risk=current, iterations=iteration - 1, converged=True
            )

        while step >= MIN_STEP:
            candidate = bounds.project(theta - step * grad)
            result, candidate_grad = solve(candidate)
            decrease = float(grad @ (theta - candidate))
            if result.value <= current.value - ARMIJO * decrease:
                theta, current, grad = candidate, result, candidate_grad
                step *= 2
                break
            step *= 0.5
        else:
            break

    return TrainResult(
        theta=list(theta), risk=current, iterations=iteration, converged=False
    )


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
