import math

import numpy as np
import pytest

from dual_gen import MonteCarloBudget, ReferenceCache
from errors import InvalidArgument, UnboundedDual
from geometry import SampleSpace
from models import ThetaBounds, make_model

from .robust_risk import DualObjective, lambda_init, lambda_model_minimizer, robust_risk


@pytest.fixture
def disk():
    return SampleSpace.ball(radius=1.0, dims=2)


@pytest.fixture
def logistic():
    return make_model("logistic", [1.0, 1.0], ThetaBounds.annulus(0.5, 3.0))


@pytest.fixture
def dataset(disk):
    return disk.uniform(np.random.default_rng(7), 12) * 0.5


def test_lambda_model_examples():
    assert lambda_model_minimizer(a=1.0, b=2.0, c=0.0, r=0.0) == pytest.approx(math.sqrt(2))
    assert lambda_model_minimizer(a=1.0, b=0.0, c=1.0, r=0.0) == pytest.approx(1.0)
    assert lambda_model_minimizer(a=1.0, b=1.0, c=1.0, r=1e6) == 0.0


def test_lambda_init_from_gradients():
    space = SampleSpace.ball_x_interval(radius=2.0, y_bound=1.0, dims=2)
    model = make_model("linear_regression", [1.0], ThetaBounds.annulus(0.5, 2.0))
    data = [[math.sqrt(2), 0.0]]
    assert space.contains(data).all()
    assert lambda_init(model, data, rho=1.0) == pytest.approx(math.sqrt(2))


def test_lambda_init_needs_a_positive_radius(logistic, dataset):
    with pytest.raises(InvalidArgument):
        lambda_init(logistic, dataset, rho=0.0)


def test_zero_radius_returns_the_empirical_risk(disk, logistic, dataset):
    result = robust_risk(logistic, disk, dataset, rho=0.0)
    assert result.value == logistic.value(dataset).mean()
    assert math.isinf(result.lambda_star)


def test_zero_radius_with_regularization_is_rejected(disk, logistic, dataset):
    with pytest.raises(InvalidArgument) as exc_info:
        robust_risk(logistic, disk, dataset, rho=0.0, eps=0.1, sigma=0.1)
    assert "rho=0" in str(exc_info.value)


@pytest.mark.parametrize("rho", [0.01, 0.3, 2.0])
def test_constant_loss_is_degenerate(disk, dataset, rho):
    model = make_model("constant", [1.25])
    result = robust_risk(model, disk, dataset, rho=rho)
    assert result.value == 1.25
    assert result.lambda_star == 0.0
    assert result.degenerate


def test_unregularized_risk_grows_with_the_radius(disk, logistic, dataset):
    values = [robust_risk(logistic, disk, dataset, rho=rho).value for rho in (0.05, 0.1, 0.2, 0.4)]
    assert np.all(np.diff(values) >= -1e-9)
    assert values[0] >= logistic.value(dataset).mean()


def test_every_visited_lambda_bounds_the_value(disk, logistic, dataset):
    result = robust_risk(logistic, disk, dataset, rho=0.2)
    assert result.evals == len(result.path)
    assert all(value >= result.value for _, value in result.path)
    lo, hi = result.bracket
    assert lo <= result.lambda_star <= hi


def test_small_radius_multiplier_is_close_to_the_closed_form(disk, logistic, dataset):
    for rho in (0.05, 0.1, 0.2):
        guess = lambda_init(logistic, dataset, rho)
        result = robust_risk(logistic, disk, dataset, rho=rho)
        assert guess / 8 <= result.lambda_star <= 8 * guess


@pytest.mark.filterwarnings("ignore::errors.LowEffectiveSampleSize")
def test_regularized_risk_grows_with_the_radius_on_shared_samples(disk, logistic, dataset):
    budget = MonteCarloBudget(samples_per_xi=512)
    cache = ReferenceCache.build(disk, dataset, budget, np.random.default_rng(3), sigma=0.1)
    results = [
        robust_risk(logistic, disk, dataset, rho, eps=0.05, sigma=0.1, budget=budget, cache=cache)
        for rho in (0.05, 0.1, 0.2, 0.4)
    ]
    for earlier, later in zip(results, results[1:]):
        assert later.value >= earlier.value - 3 * max(earlier.stderr, later.stderr)
    assert all(result.stderr > 0 for result in results)


@pytest.mark.filterwarnings("ignore::errors.LowEffectiveSampleSize")
def test_regularized_slope_vanishes_at_the_optimum(disk, logistic, dataset):
    objective = DualObjective.build(
        logistic, disk, dataset, 0.05, eps=0.05, sigma=0.1,
        budget=MonteCarloBudget(samples_per_xi=512), rng=np.random.default_rng(5),
    )
    result = objective.minimize()
    assert not result.degenerate
    assert abs(objective.evaluate(result.lambda_star).slope) <= 1e-3 * 0.05**2


def test_runaway_multiplier_is_reported():
    space = SampleSpace.ball_x_interval(radius=2.0, y_bound=20.0, dims=2)
    model = make_model("linear_regression", [10.0], ThetaBounds.annulus(1.0, 20.0))
    objective = DualObjective.build(model, space, [[1.0, -5.0]], rho=1e-9)
    with pytest.raises(UnboundedDual):
        objective.minimize(start=1.0)


def test_unregularized_objective_is_convex_in_lambda(disk, logistic, dataset):
    cache = ReferenceCache.build(disk, dataset, MonteCarloBudget(), np.random.default_rng(3))
    objective = DualObjective.build(logistic, disk, dataset, 0.2, cache=cache)
    values = [objective.evaluate(lam).value for lam in np.linspace(0.0, 6.0, 25)]
    assert np.all(np.diff(values, n=2) >= -1e-9)
