import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from records import Serializable
from risk import TrainResult, true_risk, train_robust
from streams import Purpose, stream

from .config import Config
from .datagen import Setting, build_setting, generate_dataset, reference_sample
from .reports import coverage_table, frame
from .runner import Failure, ReplicateRunner

SLACK_SE = 3.0


class CoverageRow(Serializable):
    rho: float
    eps: float
    sigma: float
    replicate: int
    robust_risk: float
    robust_stderr: float
    true_risk: float
    true_stderr: float
    covered: int
    status: str
    slack: float
    true_risk_unsmoothed: float
    covered_unsmoothed: int
    seed: int
    n: int


@dataclass(frozen=True)
class CoverageReport:
    rows: pd.DataFrame
    summary: pd.DataFrame


@dataclass(frozen=True)
class TrainedReplicate:
    """A model trained on one replicate, kept for checks that reuse it"""

    result: TrainResult
    data: np.ndarray


def slack(*stderrs: float) -> float:
    return SLACK_SE * math.sqrt(sum(se**2 for se in stderrs))


def train_replicate(
    config: Config, setting: Setting, rho: float, replicate: int, size: int
) -> TrainedReplicate:
    eps, sigma = config.wdro.at(rho)
    data = generate_dataset(config, replicate, size)
    rng = stream(config.experiment.seed, Purpose.TRAIN, replicate, size)
    result = train_robust(
        setting.model, setting.space, data, rho, eps, sigma,
        budget=config.mc, opt=config.opt, rng=rng,
    )
    return TrainedReplicate(result=result, data=data)


def coverage_job(config: Config, setting: Setting, truth: np.ndarray):
    """Job for one (size, rho index, replicate): train, then compare the robust risk
    with the true risk of the trained model"""
    seed = config.experiment.seed

    def job(key) -> CoverageRow:
        size, index, replicate = key
        rho = config.experiment.rho_grid[index]
        eps, sigma = config.wdro.at(rho)
        trained = train_replicate(config, setting, rho, replicate, size)
        model = setting.model.with_theta(trained.result.theta)
        robust = trained.result.risk

        def sampler(count, rng):
            return truth

        plain = true_risk(model, sampler, len(truth), stream(seed, Purpose.EVAL, replicate))
        target = plain
        if eps > 0:
            rng = stream(seed, Purpose.EVAL, replicate, size, index)
            target = true_risk(
                model, sampler, len(truth), rng, smoothed=True, sigma=sigma, space=setting.space
            )

        margin = slack(robust.stderr, target.stderr)
        return CoverageRow(
            rho=rho,
            eps=eps,
            sigma=sigma,
            replicate=replicate,
            robust_risk=robust.value,
            robust_stderr=robust.stderr,
            true_risk=target.estimate,
            true_stderr=target.stderr,
            covered=int(robust.value >= target.estimate - margin),
            status="ok",
            slack=margin,
            true_risk_unsmoothed=plain.estimate,
            covered_unsmoothed=int(
                robust.value >= plain.estimate - slack(robust.stderr, plain.stderr)
            ),
            seed=seed,
            n=size,
        )

    return job


def failed_row(config: Config, failure: Failure) -> CoverageRow:
    size, index, replicate = failure.key
    rho = config.experiment.rho_grid[index]
    eps, sigma = config.wdro.at(rho)
    return CoverageRow(
        rho=rho,
        eps=eps,
        sigma=sigma,
        replicate=replicate,
        robust_risk=math.nan,
        robust_stderr=math.nan,
        true_risk=math.nan,
        true_stderr=math.nan,
        covered=0,
        status=failure.status,
        slack=math.nan,
        true_risk_unsmoothed=math.nan,
        covered_unsmoothed=0,
        seed=config.experiment.seed,
        n=size,
    )


async def coverage_rows(
    config: Config, sizes: list[int], replicates: list[int] | None = None
) -> list[CoverageRow]:
    experiment = config.experiment
    replicates = replicates if replicates is not None else range(experiment.replicates)
    setting = build_setting(config)
    truth = reference_sample(config)

    keys = [
        (size, index, replicate)
        for size in sizes
        for index in range(len(experiment.rho_grid))
        for replicate in replicates
    ]
    job = coverage_job(config, setting, truth)
    results = await ReplicateRunner(experiment.threads).map(job, keys)
    return [
        failed_row(config, result) if isinstance(result, Failure) else result
        for result in results
    ]


async def run_coverage(config: Config, replicates: list[int] | None = None) -> CoverageReport:
    rows = frame(await coverage_rows(config, [config.data.n], replicates))
    summary = coverage_table(rows, ["rho", "eps", "sigma"])
    if config.experiment.unsmoothed:
        unsmoothed = coverage_table(rows, ["rho", "eps", "sigma"], flag="covered_unsmoothed")
        summary["coverage_unsmoothed"] = unsmoothed["coverage"]
    return CoverageReport(rows=rows.drop(columns="n"), summary=summary)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
