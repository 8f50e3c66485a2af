import math
from dataclasses import dataclass
from enum import StrEnum, auto

import numpy as np
import pandas as pd

from geometry import SampleSpace
from models import LossModel
from records import Serializable
from risk import true_risk
from streams import Purpose, stream

from .config import Config
from .coverage import slack, train_replicate
from .datagen import build_setting, reference_sample
from .reports import coverage_table, frame
from .runner import Failure, ReplicateRunner

CONTROL_FACTOR = 4.0


class ShiftKind(StrEnum):
    IN_BUDGET = auto()
    CONTROL = auto()


class ShiftRow(Serializable):
    t: float
    budget: float
    mean_loss_shifted: float
    robust_risk: float
    covered: int
    replicate: int
    status: str
    seed: int
    kind: ShiftKind
    delta: float
    transport_bound: float
    shifted_stderr: float


@dataclass(frozen=True)
class ShiftReport:
    rows: pd.DataFrame
    summary: pd.DataFrame


def worst_direction(model: LossModel, data: np.ndarray) -> np.ndarray:
    """Unit vector along the mean loss gradient over the data"""
    direction = np.atleast_2d(model.grad_xi(data)).mean(axis=0)
    norm = np.linalg.norm(direction)
    if norm == 0:
        return np.eye(direction.size)[0]
    return direction / norm


def translation(bound: float) -> float:
    """Largest t, up to round-off, with 1/2 t^2 <= bound"""
    t = math.sqrt(2 * bound)
    while 0.5 * t * t > bound:
        t = math.nextafter(t, 0.0)
    return t


def shift_distances(budget: float, points: int) -> list[float]:
    return [translation(budget * k / (points - 1)) for k in range(points)]


def shifted(space: SampleSpace, points: np.ndarray, t: float, direction: np.ndarray) -> np.ndarray:
    """Translate then project back; projection onto a convex set cannot
    lengthen the move, so the coupling costs at most 1/2 t^2"""
    return space.project(points + t * direction)


def regularized_delta(eps: float, rho: float, lam: float) -> float:
    if eps == 0:
        return 0.0
    return math.inf if lam == 0 else eps * rho / lam


async def run_shift(config: Config, replicates: list[int] | None = None) -> ShiftReport:
    """Coverage of translated test distributions within and beyond the
    transport budget rho(rho - rho_n), at the largest radius of the grid"""
    experiment = config.experiment
    seed = experiment.seed
    rho = experiment.rho_grid[-1]
    eps, _ = config.wdro.at(rho)
    budget = max(rho * (rho - experiment.rho_n), 0.0)
    setting = build_setting(config)
    truth = reference_sample(config)

    plan = [(ShiftKind.IN_BUDGET, budget, t) for t in shift_distances(budget, experiment.shift_points)]
    control = CONTROL_FACTOR * budget
    plan.append((ShiftKind.CONTROL, control, translation(control)))

    def job(replicate) -> list[ShiftRow]:
        trained = train_replicate(config, setting, rho, replicate, config.data.n)
        model = setting.model.with_theta(trained.result.theta)
        robust = trained.result.risk
        direction = worst_direction(model, trained.data)
        delta = regularized_delta(eps, rho, robust.lambda_star)

        rows = []
        for kind, declared, t in plan:
            moved = shifted(setting.space, truth, t, direction)
            loss = true_risk(
                model, lambda count, rng: moved, len(moved), stream(seed, Purpose.SHIFT, replicate)
            )
            rows.append(
                ShiftRow(
                    t=t,
                    budget=declared,
                    mean_loss_shifted=loss.estimate,
                    robust_risk=robust.value,
                    covered=int(loss.estimate <= robust.value + slack(loss.stderr, robust.stderr)),
                    replicate=replicate,
                    status="ok",
                    seed=seed,
                    kind=kind,
                    delta=delta,
                    transport_bound=0.5 * t * t,
                    shifted_stderr=loss.stderr,
                )
            )
        return rows

    replicates = list(replicates if replicates is not None else range(experiment.replicates))
    results = await ReplicateRunner(experiment.threads).map(job, replicates)

    rows = []
    for replicate, result in zip(replicates, results):
        if not isinstance(result, Failure):
            rows.extend(result)
            continue
        rows.extend(
            ShiftRow(
                t=t,
                budget=declared,
                mean_loss_shifted=math.nan,
                robust_risk=math.nan,
                covered=0,
                replicate=replicate,
                status=result.status,
                seed=seed,
                kind=kind,
                delta=math.nan,
                transport_bound=0.5 * t * t,
                shifted_stderr=math.nan,
            )
            for kind, declared, t in plan
        )

    table = frame(rows)
    return ShiftReport(rows=table, summary=coverage_table(table, ["kind", "t"]))


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
