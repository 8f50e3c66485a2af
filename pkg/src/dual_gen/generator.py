import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Self

import numpy as np
from scipy.special import logsumexp

from errors import InvalidArgument, LowEffectiveSampleSize, Unimplemented
from geometry import SampleSpace, cost, draw_reference_batch, projected_ascent
from geometry.ascent import MAX_STEP
from models import LossModel

from .params import DualParams, GibbsBatch, MonteCarloBudget

TIE_RTOL = 1e-8
GRADIENT_FRACTIONS = (0.25, 0.5, 1.0)
TINY = np.finfo(float).tiny


class PhiEstimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True, eq=False)
class ReferenceCache:
    """Frozen per-point reference draws and multistart points.

    Built once per dataset and sigma so every lambda visited by an outer
    search sees the same random numbers.
    """

    centers: np.ndarray  # (n, d)
    starts: np.ndarray  # (n, multistarts, d)
    sigma: float | None = None
    samples: np.ndarray | None = None  # (n, K, d)
    costs: np.ndarray | None = None  # (n, K)
    acceptance: np.ndarray | None = None

    @classmethod
    def build(
        cls,
        space: SampleSpace,
        centers,
        budget: MonteCarloBudget,
        rng: np.random.Generator,
        sigma: float | None = None,
    ) -> Self:
        centers = np.atleast_2d(space.check(centers))
        outside = ~space.contains(centers)
        if outside.any():
            raise InvalidArgument(f"Point {centers[outside][0]} lies outside the sample space")

        size, dims = centers.shape
        starts = space.uniform(rng, size * budget.multistarts)
        starts = starts.reshape(size, budget.multistarts, dims)
        if sigma is None:
            return cls(centers=centers, starts=starts)

        draw = draw_reference_batch(
            space, centers, sigma, budget.samples_per_xi, rng, budget.acceptance_floor
        )
        return cls(
            centers=centers,
            starts=starts,
            sigma=float(sigma),
            samples=draw.points,
            costs=cost(centers[:, None, :], draw.points),
            acceptance=draw.acceptance,
        )

    def __len__(self) -> int:
        return len(self.centers)

    def sample_losses(self, model: LossModel) -> np.ndarray:
        size, count, dims = self.samples.shape
        return model.shifted_value(self.samples.reshape(-1, dims)).reshape(size, count)

    def check_for(self, params: DualParams):
        if not params.regularized:
            return
        if self.samples is None or not math.isclose(self.sigma, params.sigma):
            raise InvalidArgument(
                f"Reference cache was drawn for sigma={self.sigma}, not {params.sigma}"
            )


@dataclass(frozen=True)
class PhiBatch:
    """Dual generator values and lambda-derivatives for every cached point"""

    values: np.ndarray
    stderr: np.ndarray
    dlambda: np.ndarray
    dlambda_stderr: np.ndarray
    curvature: np.ndarray
    maximizers: np.ndarray | None = None
    converged: np.ndarray | None = None
    log_weights: np.ndarray | None = None
    ess: np.ndarray | None = None
    low_ess: bool = False


def phi_batch(
    model: LossModel,
    space: SampleSpace,
    cache: ReferenceCache,
    params: DualParams,
    budget: MonteCarloBudget,
    warm_starts: np.ndarray | None = None,
    sample_losses: np.ndarray | None = None,
) -> PhiBatch:
    cache.check_for(params)
    if params.regularized:
        if sample_losses is None:
            sample_losses = cache.sample_losses(model)
        return _smoothed_batch(model, cache, params, budget, sample_losses)
    return _sup_batch(model, space, cache, params, budget, warm_starts)


def _jackknife(logits: np.ndarray) -> np.ndarray:
    """Leave-one-out spread of log-mean-exp, row by row, in O(K)"""
    count = logits.shape[1]
    top = logits.max(axis=1, keepdims=True)
    scaled = np.exp(logits - top)
    total = scaled.sum(axis=1, keepdims=True)
    left_out = top + np.log(np.maximum(total - scaled, TINY) / (count - 1))
    centered = left_out - left_out.mean(axis=1, keepdims=True)
    return np.sqrt((count - 1) / count * np.sum(centered**2, axis=1))


def _smoothed_batch(
    model: LossModel,
    cache: ReferenceCache,
    params: DualParams,
    budget: MonteCarloBudget,
    sample_losses: np.ndarray,
) -> PhiBatch:
    costs = cache.costs
    logits = (sample_losses - params.lam * costs) / params.eps
    count = logits.shape[1]

    normalizer = logsumexp(logits, axis=1)
    log_weights = logits - normalizer[:, None]
    weights = np.exp(log_weights)
    ess = 1.0 / np.sum(weights**2, axis=1)

    mean_cost = np.sum(weights * costs, axis=1)
    deviation = costs - mean_cost[:, None]
    low_ess = bool(np.any(ess < budget.ess_floor))
    if low_ess:
        warnings.warn(
            f"Effective sample size {ess.min():.1f} below the floor {budget.ess_floor}"
            f" at lambda={params.lam:.4g}, eps={params.eps:.4g}",
            LowEffectiveSampleSize,
            stacklevel=3,
        )

    return PhiBatch(
        values=params.eps * (normalizer - math.log(count)) - model.offset,
        stderr=params.eps * _jackknife(logits),
        dlambda=-mean_cost,
        dlambda_stderr=np.sqrt(np.sum(weights**2 * deviation**2, axis=1)),
        curvature=np.sum(weights * deviation**2, axis=1) / params.eps,
        log_weights=log_weights,
        ess=ess,
        low_ess=low_ess,
    )


def start_points(
    model: LossModel,
    space: SampleSpace,
    cache: ReferenceCache,
    multistarts: int,
    warm_starts: np.ndarray | None = None,
) -> np.ndarray:
    """Multistart set per point: the point itself, steps along the loss gradient,
    the closed-form maximizers, then uniform points up to the budget"""
    centers = cache.centers
    size, dims = centers.shape

    grads = model.grad_xi(centers)
    norms = np.linalg.norm(grads, axis=1, keepdims=True)
    direction = np.divide(grads, norms, out=np.zeros_like(grads), where=norms > 0)
    structured = [centers] + [
        space.project(centers + fraction * space.diameter * direction)
        for fraction in GRADIENT_FRACTIONS
    ]
    try:
        structured += [np.broadcast_to(peak, (size, dims)) for peak in model.argmax(space)]
    except Unimplemented:
        pass

    structured = structured[:multistarts]
    extra = max(multistarts - len(structured), 0)
    blocks = [np.stack(structured, axis=1), cache.starts[:, :extra]]
    if warm_starts is not None:
        blocks.append(np.asarray(warm_starts, dtype=float).reshape(size, -1, dims))
    return np.concatenate(blocks, axis=1)


def _sup_batch(
    model: LossModel,
    space: SampleSpace,
    cache: ReferenceCache,
    params: DualParams,
    budget: MonteCarloBudget,
    warm_starts: np.ndarray | None,
) -> PhiBatch:
    centers = cache.centers
    size, dims = centers.shape
    starts = start_points(model, space, cache, budget.multistarts, warm_starts)
    per_point = starts.shape[1]
    anchors = np.repeat(centers, per_point, axis=0)
    lam = params.lam

    def objective(points, rows):
        return model.shifted_value(points) - lam * cost(anchors[rows], points)

    def gradient(points, rows):
        return model.grad_xi(points) - lam * (points - anchors[rows])

    curvature = model.smoothness + lam
    step = min(1 / curvature, MAX_STEP) if 0 < curvature < math.inf else 1.0
    result = projected_ascent(
        objective,
        gradient,
        space.project,
        starts.reshape(-1, dims),
        step=step,
        tol=budget.ascent_tol,
        max_iters=budget.ascent_max_iters,
    )

    values = result.values.reshape(size, per_point)
    points = result.points.reshape(size, per_point, dims)
    costs = cost(centers[:, None, :], points)

    best = values.max(axis=1)
    tied = values >= (best - TIE_RTOL * (1 + np.abs(best)))[:, None]
    pick = np.where(tied, costs, np.inf).argmin(axis=1)
    rows = np.arange(size)
    zeros = np.zeros(size)

    return PhiBatch(
        values=best - model.offset,
        stderr=zeros,
        dlambda=-costs[rows, pick],
        dlambda_stderr=zeros,
        curvature=zeros,
        maximizers=points[rows, pick],
        converged=result.converged.reshape(size, per_point)[rows, pick],
    )


def _single_point(model, space, xi, params, budget, rng) -> tuple[ReferenceCache, PhiBatch]:
    xi = space.check(xi)
    if xi.ndim != 1:
        raise InvalidArgument(f"Expected a single point, got shape {xi.shape}")

    budget = budget or MonteCarloBudget()
    rng = rng or np.random.default_rng()
    sigma = params.sigma if params.regularized else None
    cache = ReferenceCache.build(space, xi, budget, rng, sigma)
    return cache, phi_batch(model, space, cache, params, budget)


def phi(
    model: LossModel,
    space: SampleSpace,
    xi,
    params: DualParams,
    budget: MonteCarloBudget | None = None,
    rng: np.random.Generator | None = None,
) -> PhiEstimate:
    """Dual generator at one point: a penalized sup when eps is 0, a
    log-expectation under the truncated Gaussian reference otherwise"""
    _, batch = _single_point(model, space, xi, params, budget, rng)
    return PhiEstimate(float(batch.values[0]), float(batch.stderr[0]))


def phi_dlambda(
    model: LossModel,
    space: SampleSpace,
    xi,
    params: DualParams,
    budget: MonteCarloBudget | None = None,
    rng: np.random.Generator | None = None,
) -> PhiEstimate:
    _, batch = _single_point(model, space, xi, params, budget, rng)
    return PhiEstimate(float(batch.dlambda[0]), float(batch.dlambda_stderr[0]))


def gibbs_batch(
    model: LossModel,
    space: SampleSpace,
    xi,
    params: DualParams,
    budget: MonteCarloBudget | None = None,
    rng: np.random.Generator | None = None,
) -> GibbsBatch:
    if not params.regularized:
        raise InvalidArgument("The tilted reference measure needs eps > 0")
    cache, batch = _single_point(model, space, xi, params, budget, rng)
    return GibbsBatch(
        points=cache.samples[0],
        log_weights=batch.log_weights[0],
        ess=float(batch.ess[0]),
    )


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
