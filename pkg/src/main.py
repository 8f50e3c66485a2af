#!/usr/bin/env python3

import argparse
import asyncio
import os
import sys
from pathlib import Path

import pandas as pd

from errors import ConfigError
from harness import (
    CONFIG_FILE,
    Config,
    ReplicateRunner,
    build_setting,
    generate_dataset,
    pretty_go,
    read_config,
    run_coverage,
    run_sandwich,
    run_scaling,
    run_shift,
    write_csv,
)
from harness.reports import FLOAT_FORMAT
from harness.runner import Failure
from oracle import run_battery
from radius import critical_radius_sq, theta_grid
from risk import robust_risk, train_robust
from streams import Purpose, stream

OUTPUTS_PATH = os.getenv("OUTPUTS_PATH", "outputs")
EVAL_COLUMNS = ("value", "lambda_star", "stderr", "degenerate")


def parse_replay(value: str | None) -> list[int] | None:
    if value is None:
        return None
    key, _, index = value.partition("=")
    if key != "replicate" or not index.isdigit():
        raise ConfigError(f"--replay expects replicate=<k>, got '{value}'")
    return [int(index)]


def to_stdout(table: pd.DataFrame):
    table.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)


def _theta_columns(theta, prefix: str = "theta") -> dict:
    return {f"{prefix}_{k}": value for k, value in enumerate(theta)}


async def coverage(config: Config, args) -> int:
    report = await run_coverage(config, parse_replay(args.replay))
    write_csv(report.rows, args.out, "coverage")
    write_csv(report.summary, args.out, "coverage_summary")
    return 0


async def sandwich(config: Config, args) -> int:
    report = await run_sandwich(config, parse_replay(args.replay))
    write_csv(report.rows, args.out, "sandwich")
    write_csv(report.summary, args.out, "sandwich_summary")
    return 0


async def scaling(config: Config, args) -> int:
    report = await run_scaling(config, parse_replay(args.replay))
    write_csv(report.rows, args.out, "scaling")
    write_csv(report.coverage, args.out, "scaling_coverage")
    write_csv([report.fit], args.out, "scaling_summary")
    report.fit.write_to(args.out, "scaling_fit")
    if not report.fit.fit_available:
        print("> scaling fit unavailable: fewer than two uncensored sizes", file=sys.stderr)
    return 0


async def shift(config: Config, args) -> int:
    report = await run_shift(config, parse_replay(args.replay))
    write_csv(report.rows, args.out, "shift")
    write_csv(report.summary, args.out, "shift_summary")
    return 0


def _single_run(config: Config, args):
    replicate = (parse_replay(args.replay) or [0])[0]
    rho = config.experiment.rho_grid[0]
    eps, sigma = config.wdro.at(rho)
    data = generate_dataset(config, replicate)
    rng = stream(config.experiment.seed, Purpose.EVAL, replicate)
    return build_setting(config), data, rho, eps, sigma, rng


async def eval_risk(config: Config, args) -> int:
    setting, data, rho, eps, sigma, rng = _single_run(config, args)
    result = await asyncio.to_thread(
        robust_risk, setting.model, setting.space, data, rho, eps, sigma, config.mc, rng
    )
    extras = result.row()
    extras.pop("path")
    row = dict(rho=rho, eps=eps, sigma=sigma)
    for key in EVAL_COLUMNS:
        row[key] = extras.pop(key)
    row["bracket_lo"], row["bracket_hi"] = extras.pop("bracket")
    row.update(extras)
    to_stdout(pd.DataFrame([row]))
    return 0


async def train(config: Config, args) -> int:
    setting, data, rho, eps, sigma, rng = _single_run(config, args)
    result = await asyncio.to_thread(
        train_robust, setting.model, setting.space, data, rho, eps, sigma,
        budget=config.mc, opt=config.opt, rng=rng,
    )
    row = dict(
        rho=rho,
        eps=eps,
        sigma=sigma,
        **_theta_columns(result.theta),
        risk=result.risk.value,
        stderr=result.risk.stderr,
        lambda_star=result.risk.lambda_star,
        iterations=result.iterations,
        converged=result.converged,
    )
    to_stdout(pd.DataFrame([row]))
    return 0


async def critical_radius(config: Config, args) -> int:
    seed = config.experiment.seed
    settings = config.radius
    setting = build_setting(config)
    data = generate_dataset(config, 0, settings.samples)
    thetas = theta_grid(
        setting.model.bounds,
        setting.model.theta.size,
        settings.directions,
        settings.radii,
        rng=stream(seed, Purpose.THETA_GRID),
    )
    regimes = [(0.0, None), *zip(settings.eps_grid, settings.sigma_grid)]

    def job(index):
        eps, sigma = regimes[index]
        return critical_radius_sq(
            setting.model, setting.space, thetas, data, eps, sigma,
            budget=config.mc, rng=stream(seed, Purpose.THETA_GRID, index),
        )

    results = await ReplicateRunner(config.experiment.threads).map(job, range(len(regimes)))
    rows = []
    for (eps, sigma), report in zip(regimes, results):
        if isinstance(report, Failure):
            raise report.error
        rows.append(
            dict(
                regime=str(report.regime),
                eps=eps,
                sigma=sigma,
                rho_c_sq=report.rho_c_sq,
                stderr=report.stderr,
                **_theta_columns(report.argmin_theta, "theta_star"),
            )
        )
    table = pd.DataFrame(rows)
    write_csv(table, args.out, "critical_radius")
    to_stdout(table)
    return 0


async def oracle_check(config: Config, args) -> int:
    rows = await asyncio.to_thread(run_battery, config.experiment.seed, args.instances)
    write_csv(rows, args.out, "oracle_check")
    failed = [row for row in rows if not row.passed]
    for row in failed:
        print(f"> {row.check_name} #{row.instance} failed", file=sys.stderr)
    return 1 if failed else 0


COMMANDS = {
    "coverage": coverage,
    "sandwich": sandwich,
    "scaling": scaling,
    "shift": shift,
    "eval-risk": eval_risk,
    "train": train,
    "critical-radius": critical_radius,
    "oracle-check": oracle_check,
}


def parse_args(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=CONFIG_FILE, help="INI file with the run settings")
    common.add_argument("--out", type=Path, default=Path(OUTPUTS_PATH), help="folder for CSVs")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--replay", help="rerun a single row, as replicate=<k>")
    common.add_argument("--rho", type=float, help="replace the radius grid by one radius")
    common.add_argument("--eps0", type=float)
    common.add_argument("--sigma0", type=float)
    common.add_argument("--instances", type=int, default=25, help="oracle-check instances")

    parser = argparse.ArgumentParser(description="Wasserstein robust risks and their experiments")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, handler in COMMANDS.items():
        commands.add_parser(name, parents=[common], help=handler.__name__.replace("_", " "))
    return parser.parse_args(argv)


async def main(args) -> int:
    try:
        async with pretty_go(f"read {args.config}"):
            config = read_config(args.config).with_overrides(
                **{
                    "experiment.seed": args.seed,
                    "experiment.threads": args.threads,
                    "experiment.rho_grid": None if args.rho is None else [args.rho],
                    "wdro.eps0": args.eps0,
                    "wdro.sigma0": args.sigma0,
                }
            )
            parse_replay(args.replay)

        async with pretty_go(f"run {args.command}"):
            return await COMMANDS[args.command](config, args)
    except ConfigError:
        return 2


if __name__ == "__main__":
    sys.exit(asyncio.run(main(parse_args())))
