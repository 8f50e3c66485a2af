from enum import IntEnum

import numpy as np


class Purpose(IntEnum):
    """Independent random stream families, keyed next to the seed"""

    DATA = 1
    TRUTH = 2
    TRAIN = 3
    EVAL = 4
    ANCHORS = 5
    BOOTSTRAP = 6
    THETA_GRID = 7
    SHIFT = 8
    ORACLE = 9


def stream(seed: int, purpose: Purpose, *keys: int) -> np.random.Generator:
    """Generator for (seed, purpose, keys...); equal keys give equal draws"""
    entropy = [int(seed), int(purpose), *(int(key) for key in keys)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
