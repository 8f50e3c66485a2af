import math
from dataclasses import dataclass

import numpy as np

from errors import InvalidArgument, NumericFailure, SamplingStalled

from .sample_space import SampleSpace

ACCEPTANCE_FLOOR = 1e-3
MAX_REPEATS = 64


@dataclass(frozen=True)
class ReferenceDraw:
    points: np.ndarray  # (centers, count, d)
    proposed: np.ndarray
    accepted: np.ndarray

    @property
    def acceptance(self) -> np.ndarray:
        return self.accepted / np.maximum(self.proposed, 1)


def draw_reference_batch(
    space: SampleSpace,
    centers,
    sigma: float,
    count: int,
    rng: np.random.Generator,
    acceptance_floor: float = ACCEPTANCE_FLOOR,
) -> ReferenceDraw:
    """Rejection sampler for the truncated Gaussian reference around each center"""
    if sigma <= 0:
        raise InvalidArgument(f"Reference spread sigma must be positive, got {sigma}")
    if count < 1:
        raise InvalidArgument(f"Sample count must be at least 1, got {count}")

    centers = np.atleast_2d(space.check(centers))
    size, dims = centers.shape
    points = np.empty((size, count, dims))
    missing = np.ones((size, count), dtype=bool)
    proposed = np.zeros(size, dtype=np.int64)
    accepted = np.zeros(size, dtype=np.int64)
    min_trials = math.ceil(10 / acceptance_floor)

    repeats = 1
    while missing.any():
        rows, cols = np.nonzero(missing)
        noise = rng.standard_normal((rows.size, repeats, dims))
        proposals = centers[rows, None, :] + sigma * noise
        inside = space.contains(proposals)

        hit = inside.any(axis=1)
        first = inside.argmax(axis=1)
        points[rows[hit], cols[hit]] = proposals[hit, first[hit]]
        missing[rows[hit], cols[hit]] = False

        np.add.at(proposed, rows, repeats)
        np.add.at(accepted, rows, inside.sum(axis=1))

        rate = accepted / np.maximum(proposed, 1)
        stalled = (proposed >= min_trials) & (rate < acceptance_floor)
        if stalled.any():
            worst = int(np.argmin(np.where(stalled, rate, np.inf)))
            raise SamplingStalled(
                f"Acceptance {rate[worst]:.2e} below {acceptance_floor:.0e}"
                f" around center {centers[worst]} with sigma={sigma}"
            )

        overall = accepted.sum() / proposed.sum()
        repeats = int(min(MAX_REPEATS, max(1, math.ceil(1 / max(overall, 1e-12)))))

    return ReferenceDraw(points=points, proposed=proposed, accepted=accepted)


def sample_reference_batch(space, centers, sigma, count, rng, **kwargs) -> np.ndarray:
    return draw_reference_batch(space, centers, sigma, count, rng, **kwargs).points


def sample_reference(
    space: SampleSpace,
    center,
    sigma: float,
    count: int,
    rng: np.random.Generator,
    acceptance_floor: float = ACCEPTANCE_FLOOR,
) -> np.ndarray:
    center = space.check(center)
    if center.ndim != 1:
        raise InvalidArgument(f"Expected a single center, got shape {center.shape}")
    draw = draw_reference_batch(space, center, sigma, count, rng, acceptance_floor)
    return draw.points[0]


def acceptance_rate(
    space: SampleSpace, center, sigma: float, proposals: int, rng: np.random.Generator
) -> float:
    """Fraction of untruncated Gaussian proposals that land inside the space"""
    center = space.check(center)
    noise = rng.standard_normal((proposals, space.dims))
    return float(space.contains(center + sigma * noise).mean())


def log_partition(
    space: SampleSpace,
    center,
    sigma: float,
    rng: np.random.Generator | None = None,
    proposals: int = 100_000,
) -> float:
    """log of the Gaussian mass of the space around center, log Z_{sigma, center}"""
    gaussian = 0.5 * space.dims * math.log(2 * math.pi * sigma**2)
    if bool(space.shrunken_contains(center)) and sigma <= space.margin / 6:
        return gaussian

    if rng is None:
        raise InvalidArgument("A random stream is needed to estimate Z near the boundary")
    rate = acceptance_rate(space, center, sigma, proposals, rng)
    if rate <= 0:
        raise NumericFailure(f"No proposal landed in the space around {center}")
    return gaussian + math.log(rate)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
