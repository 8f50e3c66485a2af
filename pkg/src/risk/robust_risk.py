import math
from dataclasses import dataclass, field

import numpy as np

from dual_gen import DualParams, MonteCarloBudget, PhiBatch, ReferenceCache, phi_batch
from errors import InvalidArgument, UnboundedDual
from geometry import SampleSpace
from models import LossModel
from records import Serializable

LAMBDA_MAX = 1e9
LAMBDA_RTOL = 1e-6
EXPANSION = 4.0
INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2
GRADIENT_CHUNK = 256


class RobustRiskResult(Serializable):
    value: float
    lambda_star: float
    bracket: tuple[float, float]
    evals: int
    stderr: float = 0.0
    degenerate: bool = False
    low_ess: bool = False
    path: list[tuple[float, float]] = []


@dataclass(frozen=True)
class DualPoint:
    lam: float
    value: float
    slope: float
    stderr: float
    batch: PhiBatch | None = None


def lambda_model_minimizer(a: float, b: float, c: float, r: float) -> float:
    """Minimizer over lam >= 0 of a*lam + b/(lam + r) - c*log(lam + r)"""
    return max((c + math.sqrt(c * c + 4 * a * b)) / (2 * a) - r, 0.0)


def lambda_init(
    model: LossModel, dataset, rho: float, eps: float = 0.0, sigma: float = 1.0
) -> float:
    if rho <= 0:
        raise InvalidArgument(f"Closed-form lambda needs rho > 0, got {rho}")
    data = np.atleast_2d(dataset)
    grad_sq = np.sum(model.grad_xi(data) ** 2, axis=1)
    return lambda_model_minimizer(
        a=rho**2,
        b=0.5 * float(grad_sq.mean()),
        c=0.5 * eps * data.shape[1],
        r=eps / sigma**2 if eps > 0 else 0.0,
    )


@dataclass(eq=False)
class DualObjective:
    """lam -> lam * rho^2 + mean phi over a dataset, on frozen random numbers.

    Points are memoized by lam, and every visited lam is kept in the path.
    """

    model: LossModel
    space: SampleSpace
    data: np.ndarray
    rho: float
    params: DualParams
    budget: MonteCarloBudget
    cache: ReferenceCache
    evals: int = 0
    low_ess: bool = False
    memo: dict[float, DualPoint] = field(default_factory=dict)
    warm: np.ndarray | None = None
    sample_losses: np.ndarray | None = None

    @classmethod
    def build(
        cls,
        model: LossModel,
        space: SampleSpace,
        dataset,
        rho: float,
        eps: float = 0.0,
        sigma: float = 1.0,
        budget: MonteCarloBudget | None = None,
        rng: np.random.Generator | None = None,
        cache: ReferenceCache | None = None,
    ):
        if rho < 0 or not math.isfinite(rho):
            raise InvalidArgument(f"Radius must be finite and >= 0, got {rho}")
        if rho == 0 and eps > 0:
            raise InvalidArgument(
                "rho=0 with eps>0 forces the identity coupling, whose entropy is infinite"
            )
        data = np.atleast_2d(space.check(dataset))
        if len(data) == 0:
            raise InvalidArgument("Dataset must not be empty")

        budget = budget or MonteCarloBudget()
        params = DualParams(lam=0.0, eps=eps, sigma=sigma)
        if cache is None:
            rng = rng or np.random.default_rng()
            cache = ReferenceCache.build(
                space, data, budget, rng, sigma if params.regularized else None
            )
        return cls(model, space, data, float(rho), params, budget, cache)

    @property
    def lambda_tol(self) -> float:
        loss_scale = max(1.0, abs(float(self.model.value(self.data).mean())))
        cost_scale = 0.5 * self.space.diameter**2
        return 1e-6 * loss_scale / cost_scale

    @property
    def path(self) -> list[tuple[float, float]]:
        return sorted((lam, point.value) for lam, point in self.memo.items())

    def evaluate(self, lam: float) -> DualPoint:
        lam = float(lam)
        if lam in self.memo:
            return self.memo[lam]

        if self.params.regularized and self.sample_losses is None:
            self.sample_losses = self.cache.sample_losses(self.model)
        batch = phi_batch(
            self.model,
            self.space,
            self.cache,
            self.params.at(lam),
            self.budget,
            warm_starts=self.warm,
            sample_losses=self.sample_losses,
        )
        self.evals += 1
        self.low_ess |= batch.low_ess
        if batch.maximizers is not None:
            self.warm = batch.maximizers

        size = len(self.data)
        point = DualPoint(
            lam=lam,
            value=lam * self.rho**2 + float(batch.values.mean()),
            slope=self.rho**2 + float(batch.dlambda.mean()),
            stderr=float(np.sqrt(np.sum(batch.stderr**2)) / size),
            batch=batch,
        )
        self.memo[lam] = point
        return point

    def _expand(self, start: float) -> tuple[float, float]:
        """Geometric bracket [lo, hi] around the sign change of the slope"""
        tol = self.lambda_tol
        hi = max(start, tol)
        if self.evaluate(hi).slope < 0:
            lo = hi
            while True:
                hi *= EXPANSION
                if hi > LAMBDA_MAX:
                    raise UnboundedDual(
                        f"Dual slope still negative at lambda={LAMBDA_MAX:.0e}"
                        f" (rho={self.rho}, eps={self.params.eps})"
                    )
                if self.evaluate(hi).slope >= 0:
                    return lo, hi
                lo = hi

        while hi / EXPANSION > tol:
            if self.evaluate(hi / EXPANSION).slope < 0:
                return hi / EXPANSION, hi
            hi /= EXPANSION
        return 0.0, hi

    def _golden(self, lo: float, hi: float) -> tuple[float, float]:
        value = lambda lam: self.evaluate(lam).value
        width = hi - lo
        tol = LAMBDA_RTOL * max(hi, self.lambda_tol)
        if width <= tol:
            return lo, hi

        steps = int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
        c, d = lo + INV_PHI_SQUARE * width, lo + INV_PHI * width
        yc, yd = value(c), value(d)
        for _ in range(steps - 1):
            width *= INV_PHI
            if yc < yd:
                hi, d, yd = d, c, yc
                c = lo + INV_PHI_SQUARE * width
                yc = value(c)
            else:
                lo, c, yc = c, d, yd
                d = lo + INV_PHI * width
                yd = value(d)
        return (lo, d) if yc < yd else (c, hi)

    def minimize(self, start: float | None = None) -> RobustRiskResult:
        if self.rho == 0:
            return self._no_perturbation()

        origin = self.evaluate(0.0)
        if origin.slope >= 0:
            return self._result(origin, (0.0, 0.0))

        if start is None:
            start = lambda_init(self.model, self.data, self.rho, self.params.eps, self.params.sigma)
        lo, hi = self._golden(*self._expand(start))
        self.evaluate(0.5 * (lo + hi))
        best = min(self.memo.values(), key=lambda p: p.value)
        return self._result(best, (lo, hi))

    def _result(self, point: DualPoint, bracket: tuple[float, float]) -> RobustRiskResult:
        lo, hi = bracket
        return RobustRiskResult(
            value=point.value,
            lambda_star=point.lam,
            bracket=(min(lo, point.lam), max(hi, point.lam)),
            evals=self.evals,
            stderr=point.stderr,
            degenerate=point.lam <= self.lambda_tol,
            low_ess=self.low_ess,
            path=self.path,
        )

    def _no_perturbation(self) -> RobustRiskResult:
        return RobustRiskResult(
            value=float(self.model.value(self.data).mean()),
            lambda_star=math.inf,
            bracket=(math.inf, math.inf),
            evals=0,
        )

    def theta_gradient(self, lam: float) -> np.ndarray:
        """Envelope gradient in theta of the objective at a fixed lam"""
        if self.rho == 0 or math.isinf(lam):
            return self.model.grad_theta(self.data).mean(axis=0)

        batch = self.evaluate(lam).batch
        if not self.params.regularized:
            return self.model.grad_theta(batch.maximizers).mean(axis=0)

        samples = self.cache.samples
        size, count, dims = samples.shape
        total = np.zeros_like(self.model.theta)
        for start in range(0, size, GRADIENT_CHUNK):
            rows = slice(start, start + GRADIENT_CHUNK)
            block = samples[rows].reshape(-1, dims)
            grads = self.model.grad_theta(block).reshape(-1, count, total.size)
            weights = np.exp(batch.log_weights[rows])
            total += np.einsum("ik,ikp->p", weights, grads)
        return total / size


def robust_risk(
    model: LossModel,
    space: SampleSpace,
    dataset,
    rho: float,
    eps: float = 0.0,
    sigma: float = 1.0,
    budget: MonteCarloBudget | None = None,
    rng: np.random.Generator | None = None,
    cache: ReferenceCache | None = None,
) -> RobustRiskResult:
    """inf over lam >= 0 of lam * rho^2 + (1/n) sum phi(f, xi_i, lam, eps, sigma)"""
    objective = DualObjective.build(model, space, dataset, rho, eps, sigma, budget, rng, cache)
    return objective.minimize()


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
