import math
from dataclasses import dataclass, replace
from typing import Self

import numpy as np
from pydantic import BaseModel, Field

from errors import InvalidArgument


@dataclass(frozen=True)
class DualParams:
    """Dual multiplier lam, entropic regularization eps and reference spread sigma"""

    lam: float
    eps: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise InvalidArgument(f"lambda must be finite and >= 0, got {self.lam}")
        if not (math.isfinite(self.eps) and self.eps >= 0):
            raise InvalidArgument(f"eps must be finite and >= 0, got {self.eps}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidArgument(f"sigma must be finite and > 0, got {self.sigma}")

    @property
    def regularized(self) -> bool:
        return self.eps > 0

    def at(self, lam: float) -> Self:
        return replace(self, lam=float(lam))

    @classmethod
    def from_radius(cls, lam: float, rho: float, eps0: float, sigma0: float) -> Self:
        """eps and sigma proportional to the radius"""
        return cls(lam=lam, eps=eps0 * rho, sigma=sigma0 * rho if sigma0 * rho > 0 else 1.0)


class MonteCarloBudget(BaseModel):
    samples_per_xi: int = Field(2048, ge=2)
    multistarts: int = Field(8, ge=1)
    ess_floor: float = Field(32.0, ge=0)
    ascent_tol: float = Field(1e-8, gt=0)
    ascent_max_iters: int = Field(500, ge=1)
    acceptance_floor: float = Field(1e-3, gt=0, lt=1)


@dataclass(frozen=True)
class GibbsBatch:
    """Reference draws around one point with their tilted log-weights"""

    points: np.ndarray
    log_weights: np.ndarray
    ess: float

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
