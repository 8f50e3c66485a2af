import math

import numpy as np
import pytest

from errors import InvalidArgument
from geometry import SampleSpace
from models import ThetaBounds, make_model

from .generator import phi
from .laplace import phi_laplace
from .params import DualParams, MonteCarloBudget


def test_flat_loss_in_the_interior():
    disk = SampleSpace.ball(radius=1.0, dims=2)
    model = make_model("constant", [0.4])
    params = DualParams(lam=3.0, eps=0.02, sigma=0.01)
    expected = 0.4 - 0.02 * math.log(0.01**2 * 3.0 / 0.02 + 1)
    assert phi_laplace(model, disk, [0.0, 0.0], params) == pytest.approx(expected)


def test_large_penalty_limit():
    disk = SampleSpace.ball(radius=1.0, dims=2)
    model = make_model("logistic", [1.0, -0.5], ThetaBounds.annulus(0.5, 3.0))
    xi = np.array([0.2, 0.3])
    loss = model.value(xi)
    grad_sq = np.sum(model.grad_xi(xi) ** 2)

    gaps = []
    for lam in (1e1, 1e2, 1e3):
        gap = phi_laplace(model, disk, xi, DualParams(lam=lam)) - loss
        assert gap == pytest.approx(grad_sq / (2 * lam))
        gaps.append(gap)
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_zero_penalty_without_regularization_is_rejected():
    disk = SampleSpace.ball(radius=1.0, dims=2)
    model = make_model("constant", [1.0])
    with pytest.raises(InvalidArgument):
        phi_laplace(model, disk, [0.0, 0.0], DualParams(lam=0.0))


def test_monte_carlo_generator_sits_between_shifted_approximations():
    space = SampleSpace.ball(radius=2.0, dims=2)
    rng = np.random.default_rng(12)
    budget = MonteCarloBudget(samples_per_xi=100_000)
    lam, eps, sigma = 10.0, 0.01, 0.1

    for _ in range(50):
        theta = rng.uniform(-1, 1, size=2)
        model = make_model("logistic", theta, ThetaBounds.annulus(0.2, 1.0))
        curvature = model.smoothness
        xi = space.uniform(rng, 1)[0] * 0.25
        params = DualParams(lam=lam, eps=eps, sigma=sigma)

        value, stderr = phi(model, space, xi, params, budget, rng)
        tol = 5 * stderr + eps * 1e-3
        lower = phi_laplace(model, space, xi, params.at(lam + curvature), rng)
        upper = phi_laplace(model, space, xi, params.at(lam - curvature), rng)
        assert lower - tol <= value <= upper + tol
