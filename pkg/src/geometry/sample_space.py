from dataclasses import dataclass, field
from enum import StrEnum, auto

import numpy as np

from errors import InvalidArgument, Unimplemented

MEMBERSHIP_RTOL = 1e-12
DEFAULT_MARGIN_RATIO = 0.1


class SpaceKind(StrEnum):
    BALL = auto()
    BOX = auto()
    BALL_X_INTERVAL = auto()


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SampleSpace:
    """Compact convex sample space: a ball, a box or a ball times an interval"""

    kind: SpaceKind
    dims: int
    center: np.ndarray = field(default_factory=lambda: _frozen([]))
    radius: float = 0.0
    lo: np.ndarray = field(default_factory=lambda: _frozen([]))
    hi: np.ndarray = field(default_factory=lambda: _frozen([]))
    y_bound: float = 0.0
    margin: float = 0.0

    @classmethod
    def ball(cls, radius: float, dims: int = 0, center=None, margin=None):
        if radius <= 0:
            raise InvalidArgument(f"Ball radius must be positive, got {radius}")
        if center is None:
            if dims < 1:
                raise InvalidArgument("A ball needs either a center or dims >= 1")
            center = np.zeros(dims)
        center = _frozen(center)
        if margin is None:
            margin = DEFAULT_MARGIN_RATIO * radius
        return cls(
            kind=SpaceKind.BALL,
            dims=center.size,
            center=center,
            radius=float(radius),
            margin=float(margin),
        )

    @classmethod
    def box(cls, lo, hi, margin=None):
        lo, hi = _frozen(lo), _frozen(hi)
        if lo.shape != hi.shape or lo.size < 1:
            raise InvalidArgument(f"Box bounds disagree: {lo.shape} vs {hi.shape}")
        if np.any(hi <= lo):
            raise InvalidArgument(f"Box must have hi > lo, got {lo} and {hi}")
        if margin is None:
            margin = DEFAULT_MARGIN_RATIO * float(np.min(hi - lo)) / 2
        return cls(kind=SpaceKind.BOX, dims=lo.size, lo=lo, hi=hi, margin=float(margin))

    @classmethod
    def ball_x_interval(cls, radius: float, y_bound: float, dims: int, margin=None):
        """Features in the ball B(0, radius) of R^(dims-1), targets in [-y_bound, y_bound]"""
        if radius <= 0 or y_bound <= 0:
            raise InvalidArgument(
                f"Radius and y bound must be positive, got {radius} and {y_bound}"
            )
        if dims < 2:
            raise InvalidArgument(f"Ball x interval needs dims >= 2, got {dims}")
        if margin is None:
            margin = DEFAULT_MARGIN_RATIO * min(radius, y_bound)
        return cls(
            kind=SpaceKind.BALL_X_INTERVAL,
            dims=dims,
            center=_frozen(np.zeros(dims - 1)),
            radius=float(radius),
            y_bound=float(y_bound),
            margin=float(margin),
        )

    def check(self, x) -> np.ndarray:
        points = np.asarray(x, dtype=float)
        if points.ndim == 0 or points.shape[-1] != self.dims:
            raise InvalidArgument(
                f"Expected points of dimension {self.dims}, got shape {points.shape}"
            )
        if not np.all(np.isfinite(points)):
            raise InvalidArgument("Points must be finite")
        return points

    @property
    def diameter(self) -> float:
        match self.kind:
            case SpaceKind.BALL:
                return 2 * self.radius
            case SpaceKind.BOX:
                return float(np.linalg.norm(self.hi - self.lo))
            case SpaceKind.BALL_X_INTERVAL:
                return float(np.hypot(2 * self.radius, 2 * self.y_bound))

    @property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        match self.kind:
            case SpaceKind.BALL:
                return self.center - self.radius, self.center + self.radius
            case SpaceKind.BOX:
                return self.lo.copy(), self.hi.copy()
            case SpaceKind.BALL_X_INTERVAL:
                lo = np.append(np.full(self.dims - 1, -self.radius), -self.y_bound)
                return lo, -lo

    def _within(self, x: np.ndarray, shrink: float) -> np.ndarray:
        slack = MEMBERSHIP_RTOL * max(self.diameter, 1.0)
        match self.kind:
            case SpaceKind.BALL:
                dist = np.linalg.norm(x - self.center, axis=-1)
                return dist <= self.radius - shrink + slack
            case SpaceKind.BOX:
                above = x >= self.lo + shrink - slack
                below = x <= self.hi - shrink + slack
                return np.all(above & below, axis=-1)
            case SpaceKind.BALL_X_INTERVAL:
                dist = np.linalg.norm(x[..., :-1], axis=-1)
                in_ball = dist <= self.radius - shrink + slack
                return in_ball & (np.abs(x[..., -1]) <= self.y_bound - shrink + slack)

    def contains(self, x) -> np.ndarray:
        return self._within(self.check(x), 0.0)

    def shrunken_contains(self, x) -> np.ndarray:
        """Whether the closed ball B(x, margin) lies inside the space"""
        return self._within(self.check(x), self.margin)

    def project(self, x) -> np.ndarray:
        points = self.check(x)
        match self.kind:
            case SpaceKind.BALL:
                return self._project_ball(points, self.center, self.radius)
            case SpaceKind.BOX:
                return np.clip(points, self.lo, self.hi)
            case SpaceKind.BALL_X_INTERVAL:
                features = self._project_ball(points[..., :-1], self.center, self.radius)
                target = np.clip(points[..., -1:], -self.y_bound, self.y_bound)
                return np.concatenate([features, target], axis=-1)

    @staticmethod
    def _project_ball(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
        offset = x - center
        dist = np.linalg.norm(offset, axis=-1, keepdims=True)
        # points within round-off of the sphere stay put so projection is idempotent
        outside = dist > radius * (1 + MEMBERSHIP_RTOL)
        scale = np.where(outside, radius / np.where(outside, dist, 1.0), 1.0)
        return center + offset * scale

    def uniform(self, rng: np.random.Generator, count: int) -> np.ndarray:
        match self.kind:
            case SpaceKind.BALL:
                return self.center + self._uniform_ball(rng, count, self.dims, self.radius)
            case SpaceKind.BOX:
                return rng.uniform(self.lo, self.hi, size=(count, self.dims))
            case SpaceKind.BALL_X_INTERVAL:
                features = self._uniform_ball(rng, count, self.dims - 1, self.radius)
                target = rng.uniform(-self.y_bound, self.y_bound, size=(count, 1))
                return np.concatenate([features, target], axis=1)

    @staticmethod
    def _uniform_ball(rng: np.random.Generator, count: int, dims: int, radius: float):
        directions = rng.standard_normal((count, dims))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = radius * rng.uniform(size=(count, 1)) ** (1 / dims)
        return directions * radii

    def probe_grid(self, resolution: int) -> np.ndarray:
        """Regular grid over the bounding box, projected onto the space (d <= 2)"""
        if self.dims > 2:
            raise Unimplemented(f"Probe grids are limited to d <= 2, got d={self.dims}")
        lo, hi = self.bounding_box
        axes = [np.linspace(a, b, resolution) for a, b in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        return self.project(points)


def cost(x, y) -> np.ndarray:
    """Transport cost 1/2 |x - y|^2 along the last axis"""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape[-1:] != y.shape[-1:]:
        raise InvalidArgument(f"Dimension mismatch: {x.shape} vs {y.shape}")
    return 0.5 * np.sum((x - y) ** 2, axis=-1)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
