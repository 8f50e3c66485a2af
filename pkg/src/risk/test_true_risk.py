import math

import numpy as np
import pytest

from errors import InvalidArgument
from geometry import SampleSpace
from models import ThetaBounds, make_model

from .true_risk import true_risk

TRUE_THETA = np.array([1.0, -0.5])
NOISE = 0.5


def gaussian_regression(count, rng):
    x = rng.standard_normal((count, 2))
    y = x @ TRUE_THETA + NOISE * rng.standard_normal(count)
    return np.column_stack([x, y])


@pytest.fixture
def regression_space():
    return SampleSpace.ball_x_interval(radius=10.0, y_bound=20.0, dims=3)


@pytest.fixture
def model():
    return make_model("linear_regression", [0.8, 0.1], ThetaBounds.annulus(0.1, 5.0))


def test_constant_loss_is_exact():
    model = make_model("constant", [0.1])
    sampler = lambda count, rng: rng.uniform(-1, 1, size=(count, 2))
    assert true_risk(model, sampler, 1000, np.random.default_rng(0)) == (0.1, 0.0)


def test_matches_the_moment_formula(model):
    estimate, stderr = true_risk(model, gaussian_regression, 100_000, np.random.default_rng(1))
    expected = 0.5 * (np.sum((model.theta - TRUE_THETA) ** 2) + NOISE**2)
    assert abs(estimate - expected) <= 4 * stderr


def test_tiny_smoothing_changes_little(model, regression_space):
    sigma = 1e-3 * regression_space.diameter
    plain = true_risk(model, gaussian_regression, 50_000, np.random.default_rng(2))
    smooth = true_risk(
        model, gaussian_regression, 50_000, np.random.default_rng(2),
        smoothed=True, sigma=sigma, space=regression_space,
    )
    combined = math.hypot(plain.stderr, smooth.stderr)
    assert abs(plain.estimate - smooth.estimate) <= 3 * combined


def test_smoothing_needs_sigma(model):
    with pytest.raises(InvalidArgument):
        true_risk(model, gaussian_regression, 10, np.random.default_rng(), smoothed=True)


def test_needs_two_draws(model):
    with pytest.raises(InvalidArgument):
        true_risk(model, gaussian_regression, 1, np.random.default_rng())
