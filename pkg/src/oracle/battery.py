import numpy as np
from pydantic import Field

from dual_gen import DualParams, MonteCarloBudget, phi, phi_laplace
from geometry import SampleSpace
from models import ThetaBounds, make_model
from records import Serializable
from risk import robust_risk
from streams import Purpose, stream

from .grid_dual import Grid, grid_dual_exact
from .quadrature import phi_quadrature
from .transport import reg_wass_sq, wass_sq_1d

GRID_RESOLUTION = 2001
HANDMADE = np.array([[-0.6], [0.1], [0.5]])


class CheckRow(Serializable):
    check_name: str
    instance: int
    reference: float
    estimate: float
    tolerance: float
    passed: bool = Field(serialization_alias="pass")

    @classmethod
    def compare(cls, name: str, instance: int, reference: float, estimate: float, tolerance: float):
        return cls(
            check_name=name,
            instance=instance,
            reference=reference,
            estimate=estimate,
            tolerance=tolerance,
            passed=bool(abs(reference - estimate) <= tolerance),
        )


def _segment() -> SampleSpace:
    return SampleSpace.ball(radius=1.0, dims=1)


def _logistic(rng: np.random.Generator, lo: float = 0.5, hi: float = 3.0):
    theta = rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)
    return make_model("logistic", [theta], ThetaBounds.annulus(lo, hi))


def dual_vs_grid(seed: int, instance: int) -> CheckRow:
    """Unregularized robust risk against the exact grid-restricted problem"""
    rng = stream(seed, Purpose.ORACLE, 1, instance)
    space = _segment()
    model = _logistic(rng)
    if instance == 0:
        data, rho = HANDMADE, 0.2
    else:
        data, rho = rng.uniform(-0.9, 0.9, size=(3, 1)), rng.uniform(0.05, 0.5)

    grid = Grid.regular(space, GRID_RESOLUTION, extra=data)
    reference = grid_dual_exact(model, data, rho, grid).value
    estimate = robust_risk(model, space, data, rho, rng=rng).value
    return CheckRow.compare("dual_vs_grid", instance, reference, estimate, 1e-3)


def phi_vs_quadrature(seed: int, instance: int, samples: int) -> CheckRow:
    rng = stream(seed, Purpose.ORACLE, 2, instance)
    space = _segment()
    model = _logistic(rng)
    xi = rng.uniform(-0.9, 0.9, size=1)
    params = DualParams(lam=rng.uniform(0, 5), eps=rng.uniform(0.05, 0.5), sigma=rng.uniform(0.1, 0.5))

    budget = MonteCarloBudget(samples_per_xi=samples)
    estimate, stderr = phi(model, space, xi, params, budget, rng)
    reference = phi_quadrature(model, space, xi, params)
    return CheckRow.compare("phi_vs_quadrature", instance, reference, estimate, 3 * stderr + 1e-6)


def laplace_vs_quadrature(seed: int, instance: int) -> CheckRow:
    """Closed-form approximation in the large-lambda, small-sigma regime"""
    rng = stream(seed, Purpose.ORACLE, 3, instance)
    space = _segment()
    model = _logistic(rng, 0.5, 1.0)
    xi = rng.uniform(-0.9, 0.9, size=1)
    eps = 1e-3
    sigma = space.margin / 6 * rng.uniform(0.5, 1.0)
    params = DualParams(lam=100 * eps / sigma**2 * rng.uniform(1.0, 3.0), eps=eps, sigma=sigma)

    estimate = phi_laplace(model, space, xi, params)
    reference = phi_quadrature(model, space, xi, params)
    return CheckRow.compare("laplace_vs_quadrature", instance, reference, estimate, eps * 1e-2)


def regularized_transport_limit(seed: int, instance: int) -> CheckRow:
    """Entropic transport at small delta against the exact 1-D transport cost"""
    rng = stream(seed, Purpose.ORACLE, 4, instance)
    points = np.linspace(-1, 1, 41)
    grid = Grid.from_points(points[:, None])
    p = np.zeros(41)
    q = np.zeros(41)
    p[rng.choice(20, size=8, replace=False)] = rng.uniform(0.5, 1.5, size=8)
    q[20 + rng.choice(21, size=8, replace=False)] = rng.uniform(0.5, 1.5, size=8)
    p, q = p / p.sum(), q / q.sum()

    reference = wass_sq_1d(points, p, points, q)
    estimate = reg_wass_sq(p, q, grid, delta=1e-3, sigma=1.0)
    return CheckRow.compare(
        "regularized_transport_limit", instance, reference, estimate, 0.05 * reference
    )


def run_battery(seed: int, instances: int = 25, samples: int = 100_000) -> list[CheckRow]:
    rows = []
    for instance in range(instances):
        rows.append(dual_vs_grid(seed, instance))
        rows.append(phi_vs_quadrature(seed, instance, samples))
        rows.append(laplace_vs_quadrature(seed, instance))
        rows.append(regularized_transport_limit(seed, instance))
    return sorted(rows, key=lambda row: (row.check_name, row.instance))


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
