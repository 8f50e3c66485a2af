import math

import numpy as np
import pytest
from scipy.stats import truncnorm

from streams import Purpose, stream

from .conftest import small_config
from .datagen import build_setting, draw, generate_dataset, reference_sample


def test_points_keep_their_margin(logistic_config):
    space = logistic_config.space.build()
    data = generate_dataset(logistic_config, replicate=0, size=500)
    assert data.shape == (500, 1)
    assert space.shrunken_contains(data).all()


def test_same_keys_give_the_same_dataset(logistic_config):
    first = generate_dataset(logistic_config, replicate=3)
    again = generate_dataset(logistic_config, replicate=3)
    other = generate_dataset(logistic_config, replicate=4)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)


def test_clipped_gaussian_moments():
    config = small_config(
        space=dict(kind="box", dims=1, lo=[-0.5], hi=[2.0], margin=0.0),
        model=dict(family="constant", theta0=[0.0], bounds="point"),
        data=dict(generator="gaussian_clipped", scale=1.0),
    )
    space = config.space.build()
    count = 20_000
    points = draw(config, space, count, stream(11, Purpose.DATA))[:, 0]

    # centered on the midpoint of the box
    lo, hi, loc = -0.5, 2.0, 0.75
    law = truncnorm((lo - loc) / 1.0, (hi - loc) / 1.0, loc=loc, scale=1.0)
    assert points.mean() == pytest.approx(law.mean(), abs=4 * law.std() / math.sqrt(count))
    assert points.std() == pytest.approx(law.std(), rel=0.03)


def test_logistic_points_fold_the_label():
    config = small_config(data=dict(noise=0.0, theta_true=[1.0]))
    data = generate_dataset(config, replicate=0, size=400)
    # label sign(x) folded in: -y * x = -|x|
    assert (data[:, 0] <= 0).all()


def test_regression_targets_stay_inside():
    config = small_config(
        space=dict(kind="ball_x_interval", dims=2, radius=1.0, y_bound=0.5),
        model=dict(family="linear_regression", theta0=[1.0]),
        data=dict(theta_true=[3.0], noise=0.2),
    )
    space = config.space.build()
    data = generate_dataset(config, replicate=0, size=300)
    assert np.abs(data[:, 1]).max() <= 0.5 - space.margin + 1e-12


def test_reference_sample_is_shared(logistic_config):
    first = reference_sample(logistic_config, 100)
    np.testing.assert_array_equal(first, reference_sample(logistic_config, 100))


def test_kernel_ridge_anchors_come_from_the_data_law():
    config = small_config(
        space=dict(kind="ball_x_interval", dims=2, radius=1.0, y_bound=1.0),
        model=dict(family="kernel_ridge", theta0=[0.1] * 4, anchors=4, bounds="box",
                   lo=[-1.0] * 4, hi=[1.0] * 4),
    )
    setting = build_setting(config)
    assert setting.model.anchors.shape == (4, 1)
    assert (np.abs(setting.model.anchors) < 1.0).all()
