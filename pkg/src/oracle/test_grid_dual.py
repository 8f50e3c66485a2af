import numpy as np
import pytest

from errors import InvalidArgument
from geometry import SampleSpace
from models import ThetaBounds, make_model
from risk import robust_risk

from .grid_dual import Grid, grid_dual_exact, grid_dual_values


@pytest.fixture
def segment():
    return SampleSpace.ball(radius=1.0, dims=1)


@pytest.fixture
def logistic():
    return make_model("logistic", [2.0], ThetaBounds.annulus(0.5, 3.0))


def test_two_point_grid_by_hand():
    result = grid_dual_values(losses=[0.0, 1.0], costs=[[0.0, 0.5]], rho=0.5)
    assert result.value == pytest.approx(0.5)
    assert result.lambda_star == pytest.approx(2.0)


def test_two_point_grid_against_mass_splits():
    # move mass q to the second point: value q, budget q * 0.5 <= rho^2
    for rho in (0.1, 0.3, 0.6):
        splits = np.linspace(0, 1, 100_001)
        feasible = splits[splits * 0.5 <= rho**2]
        assert grid_dual_values([0.0, 1.0], [[0.0, 0.5]], rho).value == pytest.approx(
            feasible.max(), abs=1e-5
        )


def test_zero_radius_on_the_data_is_the_empirical_risk(logistic):
    data = np.array([[-0.6], [0.1], [0.5], [0.5]])
    result = grid_dual_exact(logistic, data, 0.0, Grid.from_points(data))
    assert result.value == pytest.approx(logistic.value(data).mean())


def test_large_radius_reaches_the_grid_maximum(segment, logistic):
    grid = Grid.regular(segment, 101)
    data = np.array([[-0.6], [0.1]])
    result = grid_dual_exact(logistic, data, 10.0, grid)
    assert result.lambda_star == 0.0
    assert result.value == pytest.approx(logistic.value(grid.points).max())


def test_unreachable_grid_is_infeasible(logistic):
    grid = Grid.from_points([[0.5], [0.9]])
    with pytest.raises(InvalidArgument, match="infeasible"):
        grid_dual_exact(logistic, [[-0.9]], 0.1, grid)


def test_empty_grid_is_rejected():
    with pytest.raises(InvalidArgument):
        Grid.from_points(np.empty((0, 1)))
    with pytest.raises(InvalidArgument):
        grid_dual_values([], np.empty((1, 0)), 0.1)


def test_handmade_instance_matches_the_dual_solver(segment, logistic):
    data = np.array([[-0.6], [0.1], [0.5]])
    grid = Grid.regular(segment, 2001, extra=data)
    exact = grid_dual_exact(logistic, data, 0.2, grid)
    estimate = robust_risk(logistic, segment, data, rho=0.2)
    assert estimate.value == pytest.approx(exact.value, abs=1e-3)


def test_refined_grids_climb_towards_the_continuous_value(segment, logistic):
    data = np.array([[-0.6], [0.1], [0.5]])
    # nested: 51 and 201 point grids are subsets of the 2001 point grid
    values = [
        grid_dual_exact(logistic, data, 0.2, Grid.regular(segment, size, extra=data)).value
        for size in (51, 201, 2001)
    ]
    continuous = robust_risk(logistic, segment, data, rho=0.2).value
    assert values[0] <= values[1] + 1e-12 <= values[2] + 2e-12
    assert values[2] <= continuous + 1e-7
