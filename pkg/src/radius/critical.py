import math
from enum import StrEnum, auto

import numpy as np

from dual_gen import DualParams, MonteCarloBudget, ReferenceCache, phi_batch
from errors import InvalidArgument
from geometry import SampleSpace
from models import BoundsKind, LossModel, ThetaBounds
from records import Serializable

MIN_SAMPLES = 100


class Regime(StrEnum):
    STANDARD = auto()
    REGULARIZED = auto()


class CriticalRadiusReport(Serializable):
    regime: Regime
    eps: float
    sigma: float | None
    rho_c_sq: float
    stderr: float
    argmin_theta: list[float]


def theta_grid(
    bounds: ThetaBounds,
    dims: int,
    directions: int = 16,
    radii: int = 4,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Parameters to search: directions times radii for an annulus, a
    regular mesh for a box, the point itself otherwise"""
    match bounds.kind:
        case BoundsKind.POINT:
            return np.atleast_2d(bounds.lo)
        case BoundsKind.BOX:
            axes = [np.linspace(a, b, radii) for a, b in zip(bounds.lo, bounds.hi)]
            mesh = np.meshgrid(*axes, indexing="ij")
            return np.stack([m.ravel() for m in mesh], axis=-1)

    if dims == 1:
        units = np.array([[-1.0], [1.0]])
    elif dims == 2:
        angles = 2 * np.pi * np.arange(directions) / directions
        units = np.column_stack([np.cos(angles), np.sin(angles)])
    else:
        if rng is None:
            raise InvalidArgument(f"Random directions in d={dims} need a generator")
        units = rng.standard_normal((directions, dims))
        units /= np.linalg.norm(units, axis=1, keepdims=True)

    scales = np.linspace(float(bounds.lo), float(bounds.hi), radii)
    return (scales[:, None, None] * units[None, :, :]).reshape(-1, dims)


def transport_to_maximizers(
    model: LossModel,
    space: SampleSpace,
    data: np.ndarray,
    eps: float = 0.0,
    cache: ReferenceCache | None = None,
    budget: MonteCarloBudget | None = None,
) -> tuple[float, float]:
    """Mean cost of moving each data point onto the maximizers of the loss.

    With eps > 0 the maximizer set is replaced by the Gibbs measure of the
    loss at temperature eps under the reference kernel of the cache.
    """
    if eps == 0:
        costs = 0.5 * model.argmax_distance_sq(data, space)
        return float(costs.mean()), float(costs.std(ddof=1) / math.sqrt(len(costs)))

    params = DualParams(lam=0.0, eps=eps, sigma=cache.sigma)
    batch = phi_batch(model, space, cache, params, budget or MonteCarloBudget())
    costs = -batch.dlambda
    sampling = costs.var(ddof=1) / len(costs)
    monte_carlo = np.sum(batch.dlambda_stderr**2) / len(costs) ** 2
    return float(costs.mean()), float(math.sqrt(sampling + monte_carlo))


def critical_radius_sq(
    model: LossModel,
    space: SampleSpace,
    thetas,
    data,
    eps: float = 0.0,
    sigma: float | None = None,
    budget: MonteCarloBudget | None = None,
    rng: np.random.Generator | None = None,
) -> CriticalRadiusReport:
    """Smallest transport cost to the maximizers over a grid of parameters.

    Radii whose square exceeds this value make the robust problem collapse
    onto the worst case of the loss for some parameter. All grid entries
    share the data and reference draws, so refining the grid can only
    lower the estimate.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    data = np.atleast_2d(space.check(data))
    if thetas.size == 0:
        raise InvalidArgument("Parameter grid must not be empty")
    if len(data) < MIN_SAMPLES:
        raise InvalidArgument(f"Critical radius needs at least {MIN_SAMPLES} draws, got {len(data)}")

    cache = None
    if eps > 0:
        if sigma is None:
            raise InvalidArgument("The regularized critical radius needs sigma")
        budget = budget or MonteCarloBudget()
        cache = ReferenceCache.build(space, data, budget, rng or np.random.default_rng(), sigma)

    estimates = [
        transport_to_maximizers(model.with_theta(theta), space, data, eps, cache, budget)
        for theta in thetas
    ]
    best = int(np.argmin([value for value, _ in estimates]))
    value, stderr = estimates[best]
    return CriticalRadiusReport(
        regime=Regime.REGULARIZED if eps > 0 else Regime.STANDARD,
        eps=eps,
        sigma=sigma if eps > 0 else None,
        rho_c_sq=max(value, 0.0),
        stderr=stderr,
        argmin_theta=thetas[best].tolist(),
    )


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
