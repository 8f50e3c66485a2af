import math
from dataclasses import dataclass

import pandas as pd

from records import Serializable
from risk import RobustRiskResult, robust_risk
from streams import Purpose, stream

from .config import Config
from .coverage import slack
from .datagen import build_setting, generate_dataset, reference_sample
from .reports import frame
from .runner import Failure, ReplicateRunner

PASS_RATE = 0.95


class SandwichRow(Serializable):
    n: int
    rho: float
    rho_n: float
    replicate: int
    empirical_risk: float
    empirical_stderr: float
    lower_radius_sq: float
    lower_risk: float
    upper_radius_sq: float
    upper_risk: float
    lower_ok: int
    upper_ok: int
    status: str
    seed: int


@dataclass(frozen=True)
class SandwichReport:
    rows: pd.DataFrame
    summary: pd.DataFrame


def bracket_radii(rho: float, rho_n: float) -> tuple[float, float]:
    """Squared radii of the population risks that should bracket the
    empirical risk at rho^2"""
    return rho * (rho - rho_n), rho * (rho + rho_n)


async def run_sandwich(config: Config, replicates: list[int] | None = None) -> SandwichReport:
    """Population robust risks at rho(rho -+ rho_n), computed on a large
    reference sample, against the empirical robust risk at rho^2 per replicate.

    rho_n is searched over a candidate grid; the smallest candidate making
    both inequalities hold on enough replicates is reported per size.
    """
    experiment = config.experiment
    seed = experiment.seed
    setting = build_setting(config)
    reference = reference_sample(config, experiment.reference_samples)
    replicates = list(replicates if replicates is not None else range(experiment.replicates))
    runner = ReplicateRunner(experiment.threads)

    def population(key) -> RobustRiskResult:
        index, radius_sq = key
        eps, sigma = config.wdro.at(experiment.rho_grid[index])
        if radius_sq <= 0:
            return robust_risk(setting.model, setting.space, reference, 0.0)
        rng = stream(seed, Purpose.TRUTH, index, position[key])
        return robust_risk(
            setting.model, setting.space, reference, math.sqrt(radius_sq), eps, sigma,
            budget=config.mc, rng=rng,
        )

    population_keys = sorted({
        (index, max(radius_sq, 0.0))
        for index, rho in enumerate(experiment.rho_grid)
        for rho_n in experiment.rho_n_grid
        for radius_sq in bracket_radii(rho, rho_n)
    })
    position = {key: k for k, key in enumerate(population_keys)}
    population_risks = dict(zip(population_keys, await runner.map(population, population_keys)))
    for key, result in population_risks.items():
        if isinstance(result, Failure):
            raise result.error

    def empirical(key) -> RobustRiskResult:
        size, index, replicate = key
        rho = experiment.rho_grid[index]
        eps, sigma = config.wdro.at(rho)
        data = generate_dataset(config, replicate, size)
        rng = stream(seed, Purpose.EVAL, replicate, size, index)
        return robust_risk(
            setting.model, setting.space, data, rho, eps, sigma, budget=config.mc, rng=rng
        )

    keys = [
        (size, index, replicate)
        for size in experiment.n_grid
        for index in range(len(experiment.rho_grid))
        for replicate in replicates
    ]
    results = await runner.map(empirical, keys)

    rows = []
    for (size, index, replicate), result in zip(keys, results):
        rho = experiment.rho_grid[index]
        for rho_n in experiment.rho_n_grid:
            lower_sq, upper_sq = bracket_radii(rho, rho_n)
            lower = population_risks[(index, max(lower_sq, 0.0))]
            upper = population_risks[(index, upper_sq)]
            row = dict(
                n=size,
                rho=rho,
                rho_n=rho_n,
                replicate=replicate,
                lower_radius_sq=lower_sq,
                lower_risk=lower.value,
                upper_radius_sq=upper_sq,
                upper_risk=upper.value,
                seed=seed,
            )
            if isinstance(result, Failure):
                row.update(
                    empirical_risk=math.nan,
                    empirical_stderr=math.nan,
                    lower_ok=0,
                    upper_ok=0,
                    status=result.status,
                )
            else:
                vacuous = lower_sq <= 0
                row.update(
                    empirical_risk=result.value,
                    empirical_stderr=result.stderr,
                    lower_ok=int(
                        vacuous or lower.value <= result.value + slack(lower.stderr, result.stderr)
                    ),
                    upper_ok=int(result.value <= upper.value + slack(upper.stderr, result.stderr)),
                    status="ok",
                )
            rows.append(SandwichRow(**row))

    table = frame(rows)
    return SandwichReport(rows=table, summary=summarize(table))


def summarize(rows: pd.DataFrame) -> pd.DataFrame:
    """Per (n, rho): violation rates per candidate and the smallest candidate
    that holds on at least 95% of the completed replicates"""
    done = rows[rows["status"] == "ok"]
    done = done.assign(both=done["lower_ok"] & done["upper_ok"])
    records = []
    for (size, rho), group in done.groupby(["n", "rho"], sort=True):
        rates = group.groupby("rho_n", sort=True).agg(
            lower=("lower_ok", "mean"),
            upper=("upper_ok", "mean"),
            both=("both", "mean"),
            lower_risk=("lower_risk", "first"),
            upper_risk=("upper_risk", "first"),
        )
        passing = rates[rates["both"] >= PASS_RATE]
        censored = passing.empty
        chosen = rates.iloc[-1] if censored else passing.iloc[0]
        records.append(
            dict(
                n=size,
                rho=rho,
                rho_hat_n=math.nan if censored else float(passing.index[0]),
                lower_violation=1 - chosen["lower"],
                upper_violation=1 - chosen["upper"],
                gap=math.nan if censored else chosen["upper_risk"] - chosen["lower_risk"],
                censored=int(censored),
                replicates=group["replicate"].nunique(),
            )
        )
    return pd.DataFrame(records)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
