import numpy as np
import pytest

from errors import NumericFailure

from .ascent import projected_ascent
from .sample_space import SampleSpace


@pytest.fixture
def disk():
    return SampleSpace.ball(radius=1.0, dims=2)


def test_each_row_climbs_towards_its_own_target(disk):
    targets = np.array([[2.0, 0.0], [0.0, 0.3], [-3.0, -3.0]])

    def objective(points, rows):
        return -np.sum((points - targets[rows]) ** 2, axis=1)

    def gradient(points, rows):
        return -2 * (points - targets[rows])

    result = projected_ascent(objective, gradient, disk.project, np.zeros((3, 2)))
    expected = [[1.0, 0.0], [0.0, 0.3], [-np.sqrt(0.5), -np.sqrt(0.5)]]
    np.testing.assert_allclose(result.points, expected, atol=1e-6)
    assert result.converged.all()


def test_non_finite_start_is_reported(disk):
    def objective(points, rows):
        return np.full(len(points), np.nan)

    with pytest.raises(NumericFailure) as exc_info:
        projected_ascent(objective, lambda p, r: np.zeros_like(p), disk.project, np.zeros((1, 2)))
    assert "starting points" in str(exc_info.value)
