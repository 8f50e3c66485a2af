from dataclasses import dataclass

import numpy as np

from errors import SamplingStalled
from geometry import SampleSpace
from models import LossFamily, LossModel
from streams import Purpose, stream

from .config import Config, DataGenerator

MAX_ROUNDS = 1000


@dataclass(frozen=True, eq=False)
class Setting:
    """Sample space and loss model of an experiment"""

    space: SampleSpace
    model: LossModel


def _candidates(config: Config, space: SampleSpace, count: int, rng: np.random.Generator):
    data = config.data
    if data.generator == DataGenerator.UNIFORM:
        points = space.uniform(rng, count)
    else:
        lo, hi = space.bounding_box
        points = (lo + hi) / 2 + data.scale * rng.standard_normal((count, space.dims))

    theta = np.asarray(data.theta_true)
    match config.model.family:
        case LossFamily.LOGISTIC:
            # labels folded into the point: xi = -y * x
            labels = np.sign(points @ theta + data.noise * rng.standard_normal(count))
            labels[labels == 0] = 1.0
            return -labels[:, None] * points
        case LossFamily.LINEAR_REGRESSION | LossFamily.KERNEL_RIDGE:
            features = points[:, :-1]
            target = features @ theta[: features.shape[1]]
            target += data.noise * rng.standard_normal(count)
            bound = space.y_bound - space.margin
            return np.column_stack([features, np.clip(target, -bound, bound)])
        case _:
            return points


def draw(config: Config, space: SampleSpace, count: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. draws from the configured distribution, rejected into the
    shrunken space so every point keeps its margin inside"""
    batch = max(2 * count, 64)
    kept, total, proposed = [], 0, 0
    for _ in range(MAX_ROUNDS):
        candidates = _candidates(config, space, batch, rng)
        accepted = candidates[space.shrunken_contains(candidates)]
        kept.append(accepted)
        total += len(accepted)
        proposed += batch
        if total >= count:
            return np.concatenate(kept)[:count]
    raise SamplingStalled(
        f"Only {total} of {count} draws landed inside the shrunken space"
        f" after {proposed} proposals"
    )


def generate_dataset(config: Config, replicate: int, size: int | None = None) -> np.ndarray:
    size = size or config.data.n
    space = config.space.build()
    rng = stream(config.experiment.seed, Purpose.DATA, replicate, size)
    return draw(config, space, size, rng)


def reference_sample(config: Config, count: int | None = None) -> np.ndarray:
    """Large sample standing in for the data distribution, shared across radii"""
    count = count or config.experiment.true_risk_samples
    space = config.space.build()
    return draw(config, space, count, stream(config.experiment.seed, Purpose.TRUTH, count))


def build_setting(config: Config) -> Setting:
    space = config.space.build()
    anchors = None
    if config.model.family == LossFamily.KERNEL_RIDGE:
        rng = stream(config.experiment.seed, Purpose.ANCHORS)
        anchors = draw(config, space, config.model.anchors, rng)[:, :-1]
    return Setting(space=space, model=config.model.build(space, anchors))


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
