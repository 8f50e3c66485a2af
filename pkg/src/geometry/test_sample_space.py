import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import InvalidArgument, Unimplemented

from .sample_space import SampleSpace, SpaceKind, cost

coords = st.floats(min_value=-50, max_value=50, allow_nan=False)


@pytest.fixture
def unit_disk():
    return SampleSpace.ball(radius=1.0, dims=2)


@pytest.fixture
def unit_square():
    return SampleSpace.box(lo=[0.0, 0.0], hi=[1.0, 1.0])


@pytest.fixture
def regression_space():
    return SampleSpace.ball_x_interval(radius=2.0, y_bound=1.0, dims=3)


def test_ball_projection_scales_radially(unit_disk):
    assert np.array_equal(unit_disk.project([2.0, 0.0]), [1.0, 0.0])


def test_interior_point_is_fixed(unit_disk):
    assert np.array_equal(unit_disk.project([0.3, 0.4]), [0.3, 0.4])


def test_box_projection_clamps(unit_square):
    assert np.array_equal(unit_square.project([-1.0, 2.0]), [0.0, 1.0])


def test_ball_x_interval_projects_componentwise(regression_space):
    projected = regression_space.project([4.0, 0.0, -3.0])
    assert np.allclose(projected, [2.0, 0.0, -1.0])


@given(st.lists(coords, min_size=2, max_size=2))
def test_ball_projection_is_idempotent(point):
    disk = SampleSpace.ball(radius=1.0, dims=2)
    once = disk.project(point)
    assert np.array_equal(disk.project(once), once)
    assert disk.contains(once)


@given(st.lists(coords, min_size=3, max_size=3))
def test_product_projection_is_idempotent(point):
    space = SampleSpace.ball_x_interval(radius=2.0, y_bound=1.0, dims=3)
    once = space.project(point)
    assert np.array_equal(space.project(once), once)
    assert space.contains(once)


def test_dimension_mismatch_is_rejected(unit_disk):
    with pytest.raises(InvalidArgument) as exc_info:
        unit_disk.project([1.0, 2.0, 3.0])
    assert "dimension 2" in str(exc_info.value)


def test_default_margin_is_a_tenth_of_the_radius():
    ball = SampleSpace.ball(radius=5.0, dims=3)
    assert ball.kind == SpaceKind.BALL
    assert ball.margin == pytest.approx(0.5)


def test_shrunken_membership(unit_disk):
    assert unit_disk.shrunken_contains([0.85, 0.0])
    assert not unit_disk.shrunken_contains([0.95, 0.0])
    assert unit_disk.contains([0.95, 0.0])


def test_uniform_points_are_inside(regression_space):
    rng = np.random.default_rng(3)
    points = regression_space.uniform(rng, 500)
    assert points.shape == (500, 3)
    assert regression_space.contains(points).all()


def test_probe_grid_covers_the_boundary(unit_disk):
    grid = unit_disk.probe_grid(41)
    assert unit_disk.contains(grid).all()
    assert np.isclose(np.linalg.norm(grid, axis=1).max(), 1.0)


def test_probe_grid_is_limited_to_two_dimensions():
    with pytest.raises(Unimplemented):
        SampleSpace.ball(radius=1.0, dims=3).probe_grid(5)


def test_invalid_spaces():
    with pytest.raises(InvalidArgument):
        SampleSpace.ball(radius=0.0, dims=2)
    with pytest.raises(InvalidArgument):
        SampleSpace.box(lo=[1.0], hi=[0.0])


def test_diameters(unit_disk, unit_square, regression_space):
    assert unit_disk.diameter == pytest.approx(2.0)
    assert unit_square.diameter == pytest.approx(np.sqrt(2))
    assert regression_space.diameter == pytest.approx(np.hypot(4.0, 2.0))


def test_cost_examples():
    assert cost([1.5, -2.0], [1.5, -2.0]) == 0.0
    assert cost([0.0], [3.0]) == pytest.approx(4.5)


@given(
    st.lists(coords, min_size=3, max_size=3),
    st.lists(coords, min_size=3, max_size=3),
)
def test_cost_is_symmetric_and_nonnegative(x, y):
    assert cost(x, y) == cost(y, x)
    assert cost(x, y) >= 0


def test_cost_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        cost([0.0, 1.0], [0.0])
