import math
from dataclasses import dataclass, field, replace
from enum import StrEnum, auto
from typing import ClassVar, Self

import numpy as np
from scipy.special import expit

from errors import InvalidArgument, Unimplemented
from geometry import SampleSpace, SpaceKind, projected_ascent

PROBE_POINTS = 256
ARGMAX_RTOL = 1e-9


class LossFamily(StrEnum):
    LOGISTIC = auto()
    LINEAR_REGRESSION = auto()
    KERNEL_RIDGE = auto()
    CONSTANT = auto()


class BoundsKind(StrEnum):
    ANNULUS = auto()
    BOX = auto()
    POINT = auto()


@dataclass(frozen=True, eq=False)
class ThetaBounds:
    """Compact parameter set: an annulus around the origin, a box or a single point"""

    kind: BoundsKind
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def annulus(cls, r_lo: float, r_hi: float) -> Self:
        if not 0 < r_lo <= r_hi:
            raise InvalidArgument(f"Annulus needs 0 < r_lo <= r_hi, got {r_lo}, {r_hi}")
        return cls(BoundsKind.ANNULUS, np.array(float(r_lo)), np.array(float(r_hi)))

    @classmethod
    def box(cls, lo, hi) -> Self:
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        if np.any(hi < lo):
            raise InvalidArgument(f"Box needs lo <= hi, got {lo} and {hi}")
        return cls(BoundsKind.BOX, lo, hi)

    @classmethod
    def point(cls, theta) -> Self:
        theta = np.asarray(theta, dtype=float)
        return cls(BoundsKind.POINT, theta, theta)

    def project(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        match self.kind:
            case BoundsKind.ANNULUS:
                norm = np.linalg.norm(theta)
                if norm == 0:
                    theta, norm = np.eye(theta.size)[0] * self.lo, float(self.lo)
                return theta * (np.clip(norm, self.lo, self.hi) / norm)
            case BoundsKind.BOX:
                return np.clip(theta, self.lo, self.hi)
            case BoundsKind.POINT:
                return np.broadcast_to(self.lo, theta.shape).copy()


@dataclass(frozen=True, eq=False)
class LossModel:
    """Parametric loss f(theta, xi), vectorized over rows of xi"""

    family: ClassVar[LossFamily]

    theta: np.ndarray
    bounds: ThetaBounds
    declared_smoothness: float | None = None
    declared_grad_bound: float | None = None
    offset: float = 0.0

    def value(self, xi) -> np.ndarray:
        raise Unimplemented(f"Loss family {self.family} has no value")

    def grad_xi(self, xi) -> np.ndarray:
        raise Unimplemented(f"Loss family {self.family} has no xi-gradient")

    def grad_theta(self, xi) -> np.ndarray:
        raise Unimplemented(f"Loss family {self.family} has no theta-gradient")

    def argmax(self, space: SampleSpace, query=None) -> np.ndarray:
        raise Unimplemented(f"No closed-form maximizers for {self.family}")

    def default_smoothness(self) -> float:
        return math.inf

    def default_grad_bound(self, space: SampleSpace) -> float:
        return math.inf

    @property
    def smoothness(self) -> float:
        """Lipschitz constant M of the xi-gradient"""
        if self.declared_smoothness is not None:
            return self.declared_smoothness
        return self.default_smoothness()

    def grad_bound(self, space: SampleSpace) -> float:
        if self.declared_grad_bound is not None:
            return self.declared_grad_bound
        return self.default_grad_bound(space)

    def shifted_value(self, xi) -> np.ndarray:
        return self.value(xi) + self.offset

    def with_theta(self, theta) -> Self:
        return replace(self, theta=np.asarray(theta, dtype=float))

    def argmax_distance_sq(self, points, space: SampleSpace) -> np.ndarray:
        """Squared distance from each point to the maximizer set over the space"""
        points = np.atleast_2d(space.check(points))
        maximizers = argmax_set(self, space, fallback=True)
        gaps = points[:, None, :] - np.asarray(maximizers)[None, :, :]
        return np.min(np.sum(gaps**2, axis=-1), axis=1)


def _rows(xi) -> tuple[np.ndarray, bool]:
    xi = np.asarray(xi, dtype=float)
    return np.atleast_2d(xi), xi.ndim == 1


def _unit(theta: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(theta)
    if norm == 0:
        raise InvalidArgument("Parameter must not be the origin for this family")
    return theta / norm


@dataclass(frozen=True, eq=False)
class LogisticLoss(LossModel):
    """log(1 + exp(<xi, theta>)) with xi standing for -y * x"""

    family: ClassVar[LossFamily] = LossFamily.LOGISTIC

    def value(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = np.logaddexp(0.0, rows @ self.theta)
        return result[0] if single else result

    def grad_xi(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = expit(rows @ self.theta)[:, None] * self.theta
        return result[0] if single else result

    def grad_theta(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = expit(rows @ self.theta)[:, None] * rows
        return result[0] if single else result

    def argmax(self, space: SampleSpace, query=None) -> np.ndarray:
        match space.kind:
            case SpaceKind.BALL:
                return (space.center + space.radius * _unit(self.theta))[None, :]
            case SpaceKind.BOX:
                middle = (space.lo + space.hi) / 2
                corner = np.where(self.theta > 0, space.hi, space.lo)
                return np.where(self.theta == 0, middle, corner)[None, :]
        return super().argmax(space, query)

    def default_smoothness(self) -> float:
        return float(self.theta @ self.theta) / 4

    def default_grad_bound(self, space: SampleSpace) -> float:
        return float(np.linalg.norm(self.theta))


@dataclass(frozen=True, eq=False)
class LinearRegressionLoss(LossModel):
    """1/2 (<theta, x> - y)^2 with xi = (x, y)"""

    family: ClassVar[LossFamily] = LossFamily.LINEAR_REGRESSION

    def _residual(self, rows: np.ndarray) -> np.ndarray:
        return rows[:, :-1] @ self.theta - rows[:, -1]

    def value(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = 0.5 * self._residual(rows) ** 2
        return result[0] if single else result

    def grad_xi(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        residual = self._residual(rows)[:, None]
        result = residual * np.append(self.theta, -1.0)
        return result[0] if single else result

    def grad_theta(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = self._residual(rows)[:, None] * rows[:, :-1]
        return result[0] if single else result

    def argmax(self, space: SampleSpace, query=None) -> np.ndarray:
        direction = np.append(self.theta, -1.0)
        match space.kind:
            case SpaceKind.BALL_X_INTERVAL:
                edge = space.radius * _unit(self.theta)
                return np.array(
                    [np.append(edge, -space.y_bound), np.append(-edge, space.y_bound)]
                )
            case SpaceKind.BALL:
                reach = space.radius * _unit(direction)
                candidates = np.array([space.center + reach, space.center - reach])
            case SpaceKind.BOX:
                candidates = np.array(
                    [
                        np.where(direction > 0, space.hi, space.lo),
                        np.where(direction > 0, space.lo, space.hi),
                    ]
                )
            case _:
                return super().argmax(space, query)
        values = self.value(candidates)
        best = values.max()
        return candidates[values >= best - ARGMAX_RTOL * (1 + abs(best))]

    def default_smoothness(self) -> float:
        return float(self.theta @ self.theta) + 1

    def default_grad_bound(self, space: SampleSpace) -> float:
        worst = self.value(self.argmax(space)).max()
        return math.sqrt(2 * worst) * math.sqrt(self.default_smoothness())


@dataclass(frozen=True, eq=False)
class KernelRidgeLoss(LossModel):
    """1/2 (sum_i alpha_i k(x, x_i) - y)^2 + mu/2 |alpha|^2 with a Gaussian kernel"""

    family: ClassVar[LossFamily] = LossFamily.KERNEL_RIDGE

    anchors: np.ndarray = field(default_factory=lambda: np.zeros((0, 1)))
    bandwidth: float = 1.0
    ridge_mu: float = 0.0

    def _kernel(self, features: np.ndarray) -> np.ndarray:
        gaps = features[:, None, :] - self.anchors[None, :, :]
        return np.exp(-np.sum(gaps**2, axis=-1) / (2 * self.bandwidth**2))

    def _parts(self, rows: np.ndarray):
        kernel = self._kernel(rows[:, :-1])
        residual = kernel @ self.theta - rows[:, -1]
        return kernel, residual

    def value(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        _, residual = self._parts(rows)
        result = 0.5 * residual**2 + 0.5 * self.ridge_mu * float(self.theta @ self.theta)
        return result[0] if single else result

    def grad_xi(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        kernel, residual = self._parts(rows)
        weighted = kernel * self.theta
        grad_g = (weighted @ self.anchors - weighted.sum(axis=1)[:, None] * rows[:, :-1])
        grad_g /= self.bandwidth**2
        result = np.concatenate(
            [residual[:, None] * grad_g, -residual[:, None]], axis=1
        )
        return result[0] if single else result

    def grad_theta(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        kernel, residual = self._parts(rows)
        result = residual[:, None] * kernel + self.ridge_mu * self.theta
        return result[0] if single else result

    def default_smoothness(self) -> float:
        mass = float(np.abs(self.theta).sum())
        slope = mass / (self.bandwidth * math.sqrt(math.e))
        curvature = 2 * mass / self.bandwidth**2
        return slope**2 + 1 + (mass + 1) * curvature

    def default_grad_bound(self, space: SampleSpace) -> float:
        mass = float(np.abs(self.theta).sum())
        _, hi = space.bounding_box
        residual = mass + abs(float(hi[-1]))
        return residual * math.hypot(mass / (self.bandwidth * math.sqrt(math.e)), 1)


@dataclass(frozen=True, eq=False)
class ConstantLoss(LossModel):
    """f = theta[0] everywhere; every point of the space is a maximizer"""

    family: ClassVar[LossFamily] = LossFamily.CONSTANT

    def value(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = np.full(len(rows), float(self.theta[0]))
        return result[0] if single else result

    def grad_xi(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = np.zeros_like(rows)
        return result[0] if single else result

    def grad_theta(self, xi) -> np.ndarray:
        rows, single = _rows(xi)
        result = np.zeros((len(rows), self.theta.size))
        result[:, 0] = 1.0
        return result[0] if single else result

    def argmax(self, space: SampleSpace, query=None) -> np.ndarray:
        if query is None:
            lo, hi = space.bounding_box
            query = (lo + hi) / 2
        return np.atleast_2d(space.project(query))

    def argmax_distance_sq(self, points, space: SampleSpace) -> np.ndarray:
        return np.zeros(len(np.atleast_2d(space.check(points))))

    def default_smoothness(self) -> float:
        return 0.0

    def default_grad_bound(self, space: SampleSpace) -> float:
        return 0.0


FAMILIES: dict[LossFamily, type[LossModel]] = {
    cls.family: cls
    for cls in (LogisticLoss, LinearRegressionLoss, KernelRidgeLoss, ConstantLoss)
}


def make_model(
    family: LossFamily | str,
    theta,
    bounds: ThetaBounds | None = None,
    space: SampleSpace | None = None,
    **kwargs,
) -> LossModel:
    """Builds a loss model, projecting theta into its parameter set.

    When a space is given, the loss is probed on it and a non-negativity
    offset is recorded.
    """
    try:
        cls = FAMILIES[LossFamily(family)]
    except ValueError:
        raise Unimplemented(f"Unsupported loss family '{family}'")

    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if bounds is None:
        bounds = ThetaBounds.point(theta)
    if cls in (LogisticLoss, LinearRegressionLoss) and bounds.kind != BoundsKind.ANNULUS:
        raise InvalidArgument(f"{cls.family} needs an annulus that excludes the origin")

    model = cls(theta=bounds.project(theta), bounds=bounds, **kwargs)
    if space is not None:
        model = replace(model, offset=probe_offset(model, space))
    return model


def probe_offset(model: LossModel, space: SampleSpace) -> float:
    rng = np.random.default_rng(0)
    probes = space.uniform(rng, PROBE_POINTS)
    if space.dims <= 2:
        probes = np.concatenate([probes, space.probe_grid(17)])
    return max(0.0, -float(model.value(probes).min()))


def loss_eval(model: LossModel, xi) -> np.ndarray:
    return model.value(xi)


def loss_grads(model: LossModel, xi) -> tuple[np.ndarray, np.ndarray]:
    return model.grad_xi(xi), model.grad_theta(xi)


def argmax_set(
    model: LossModel,
    space: SampleSpace,
    fallback: bool = False,
    query=None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Maximizers of f(theta, .) over the space, one per row"""
    try:
        return model.argmax(space, query)
    except Unimplemented:
        if not fallback:
            raise
    if space.dims > 2:
        raise Unimplemented(
            f"No certified maximizers for {model.family} in d={space.dims} without regularization"
        )
    return numerical_argmax(model, space, rng)


def numerical_argmax(
    model: LossModel,
    space: SampleSpace,
    rng: np.random.Generator | None = None,
    starts: int = 32,
    tol: float = 1e-10,
) -> np.ndarray:
    """Multistart projected ascent on f, seeded from a probe grid when d <= 2"""
    rng = rng or np.random.default_rng(0)
    candidates = space.uniform(rng, starts)
    if space.dims <= 2:
        grid = space.probe_grid(201 if space.dims == 1 else 61)
        best = np.argsort(model.value(grid))[-starts:]
        candidates = np.concatenate([grid[best], candidates])

    result = projected_ascent(
        objective=lambda x, rows: model.value(x),
        gradient=lambda x, rows: model.grad_xi(x),
        project=space.project,
        starts=candidates,
        step=1 / max(model.smoothness, 1e-12),
        tol=tol,
        max_iters=5000,
    )
    best = result.values.max()
    near = result.values >= best - ARGMAX_RTOL * (1 + abs(best))
    maximizers = []
    for point in result.points[near]:
        if all(np.linalg.norm(point - kept) > 1e-6 for kept in maximizers):
            maximizers.append(point)
    return np.array(maximizers)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
