import numpy as np

from geometry import SampleSpace
from models import LossModel, argmax_set
from records import Serializable
from risk import robust_risk


class DegeneracyReport(Serializable):
    lambda_star: float
    max_f: float
    risk: float
    transport_cost: float
    is_degenerate: bool


def degenerate_check(
    model: LossModel,
    space: SampleSpace,
    dataset,
    rho: float,
    tol: float = 1e-6,
) -> DegeneracyReport:
    """Whether the unregularized robust risk has collapsed onto max f.

    Once rho^2 covers the mean cost of moving the data onto the maximizers
    the optimal multiplier is zero and the risk equals the worst case.
    """
    data = np.atleast_2d(space.check(dataset))
    max_f = float(model.value(argmax_set(model, space, fallback=True)).max())
    transport = float(np.mean(0.5 * model.argmax_distance_sq(data, space)))
    result = robust_risk(model, space, data, rho)
    return DegeneracyReport(
        lambda_star=result.lambda_star,
        max_f=max_f,
        risk=result.value,
        transport_cost=transport,
        is_degenerate=bool(result.lambda_star <= tol or transport == 0),
    )


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
