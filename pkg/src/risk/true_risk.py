import math
from typing import Callable, NamedTuple

import numpy as np

from errors import InvalidArgument
from geometry import SampleSpace, sample_reference_batch
from models import LossModel

Sampler = Callable[[int, np.random.Generator], np.ndarray]


class RiskEstimate(NamedTuple):
    estimate: float
    stderr: float


def true_risk(
    model: LossModel,
    sampler: Sampler,
    count: int,
    rng: np.random.Generator,
    smoothed: bool = False,
    sigma: float | None = None,
    space: SampleSpace | None = None,
) -> RiskEstimate:
    """Monte Carlo risk under P; the smoothed variant moves every draw once
    through the reference kernel of spread sigma"""
    if count < 2:
        raise InvalidArgument(f"True risk needs at least 2 draws, got {count}")

    points = sampler(count, rng)
    if smoothed:
        if sigma is None or space is None:
            raise InvalidArgument("Smoothed risk needs both sigma and the sample space")
        points = sample_reference_batch(space, points, sigma, 1, rng)[:, 0, :]

    values = model.value(points)
    if np.ptp(values) == 0:
        return RiskEstimate(float(values[0]), 0.0)
    return RiskEstimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(count)))


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
