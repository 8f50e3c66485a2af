import numpy as np
import pytest

from dual_gen import MonteCarloBudget, ReferenceCache
from geometry import SampleSpace
from models import ThetaBounds, make_model

from .robust_risk import DualObjective, robust_risk
from .training import OptBudget, train_robust


@pytest.fixture
def regression_data():
    rng = np.random.default_rng(21)
    x = rng.uniform(-1.5, 1.5, size=40)
    y = 1.5 * x + 0.1 * rng.standard_normal(40)
    return np.column_stack([x, y])


def test_zero_radius_training_recovers_least_squares(regression_data):
    space = SampleSpace.ball_x_interval(radius=2.0, y_bound=5.0, dims=2)
    model = make_model("linear_regression", [0.5], ThetaBounds.annulus(0.1, 5.0))
    x, y = regression_data.T
    least_squares = np.sum(x * y) / np.sum(x * x)
    best_risk = 0.5 * np.mean((least_squares * x - y) ** 2)

    result = train_robust(model, space, regression_data, rho=0.0, opt=OptBudget(tol=1e-8))
    assert result.converged
    assert result.risk.value == pytest.approx(best_risk, abs=1e-4)
    assert result.theta[0] == pytest.approx(least_squares, abs=1e-3)


def test_single_point_parameter_set_is_kept():
    disk = SampleSpace.ball(radius=1.0, dims=2)
    model = make_model("constant", [0.3])
    data = disk.uniform(np.random.default_rng(0), 5) * 0.5
    result = train_robust(model, disk, data, rho=0.1)
    assert result.theta == [0.3]
    assert result.iterations == 0
    assert result.converged


@pytest.mark.filterwarnings("ignore::errors.LowEffectiveSampleSize")
def test_envelope_gradient_matches_finite_differences():
    disk = SampleSpace.ball(radius=1.0, dims=2)
    rng = np.random.default_rng(13)
    budget = MonteCarloBudget(samples_per_xi=256)
    rho, eps, sigma, h = 0.05, 0.05, 0.1, 1e-4

    for _ in range(20):
        data = disk.uniform(rng, 8) * 0.7
        cache = ReferenceCache.build(disk, data, budget, rng, sigma=sigma)
        theta = rng.uniform(-1.5, 1.5, size=2)
        model = make_model("logistic", theta, ThetaBounds.annulus(0.5, 3.0))

        objective = DualObjective.build(model, disk, data, rho, eps, sigma, budget, cache=cache)
        gradient = objective.theta_gradient(objective.minimize().lambda_star)

        finite = []
        for step in h * np.eye(2):
            risks = [
                robust_risk(model.with_theta(model.theta + sign * step), disk, data,
                            rho, eps, sigma, budget, cache=cache).value
                for sign in (1, -1)
            ]
            finite.append((risks[0] - risks[1]) / (2 * h))
        assert np.allclose(gradient, finite, rtol=1e-3, atol=1e-6)


@pytest.mark.filterwarnings("ignore::errors.LowEffectiveSampleSize")
def test_regularized_training_lowers_the_robust_risk():
    disk = SampleSpace.ball(radius=1.0, dims=2)
    rng = np.random.default_rng(4)
    data = disk.uniform(rng, 10) * 0.8
    model = make_model("logistic", [2.0, 1.0], ThetaBounds.annulus(0.5, 3.0))
    budget = MonteCarloBudget(samples_per_xi=256)

    start = robust_risk(model, disk, data, 0.1, 0.05, 0.1, budget, np.random.default_rng(9))
    result = train_robust(
        model, disk, data, 0.1, 0.05, 0.1,
        budget=budget, opt=OptBudget(max_iters=30), rng=np.random.default_rng(9),
    )
    norm = np.linalg.norm(result.theta)
    assert 0.5 - 1e-12 <= norm <= 3.0 + 1e-12
    assert result.risk.value <= start.value


def test_unregularized_envelope_gradient_matches_finite_differences():
    disk = SampleSpace.ball(radius=1.0, dims=2)
    rng = np.random.default_rng(17)
    budget = MonteCarloBudget()
    h = 1e-4

    for _ in range(20):
        data = disk.uniform(rng, 8) * 0.7
        cache = ReferenceCache.build(disk, data, budget, rng)
        theta = rng.uniform(-1.5, 1.5, size=2)
        model = make_model("logistic", theta, ThetaBounds.annulus(0.5, 3.0))

        objective = DualObjective.build(model, disk, data, 0.1, budget=budget, cache=cache)
        gradient = objective.theta_gradient(objective.minimize().lambda_star)

        finite = []
        for step in h * np.eye(2):
            risks = [
                robust_risk(model.with_theta(model.theta + sign * step), disk, data,
                            0.1, budget=budget, cache=cache).value
                for sign in (1, -1)
            ]
            finite.append((risks[0] - risks[1]) / (2 * h))
        assert np.allclose(gradient, finite, rtol=1e-4, atol=1e-7)
