import math

import numpy as np

from errors import InvalidArgument
from geometry import SampleSpace, log_partition
from models import LossModel

from .params import DualParams


def phi_laplace(
    model: LossModel,
    space: SampleSpace,
    xi,
    params: DualParams,
    rng: np.random.Generator | None = None,
    log_z: float | None = None,
) -> float:
    """Second-order closed form of the dual generator around xi.

    log_z defaults to log_partition, which needs rng when xi is close to the
    boundary of the space.
    """
    xi = space.check(xi)
    value = float(model.value(xi))
    grad_sq = float(np.sum(model.grad_xi(xi) ** 2))

    if not params.regularized:
        if params.lam <= 0:
            raise InvalidArgument("Laplace approximation needs lambda + eps/sigma^2 > 0")
        return value + grad_sq / (2 * params.lam)

    dims, eps, sigma = space.dims, params.eps, params.sigma
    precision = params.lam + eps / sigma**2
    if log_z is None:
        log_z = log_partition(space, xi, sigma, rng)

    return (
        value
        + grad_sq / (2 * precision)
        - 0.5 * eps * dims * math.log(params.lam / eps + 1 / sigma**2)
        + eps * (0.5 * dims * math.log(2 * math.pi) - log_z)
    )


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
