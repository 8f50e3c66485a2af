import math
from pathlib import Path

import pandas as pd

from records import Serializable

WILSON_Z = 1.96
FLOAT_FORMAT = "%.9g"


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    share = successes / trials
    spread = z**2 / trials
    center = (share + spread / 2) / (1 + spread)
    half = z / (1 + spread) * math.sqrt(share * (1 - share) / trials + spread / (4 * trials))
    return max(center - half, 0.0), min(center + half, 1.0)


def frame(rows: list[Serializable]) -> pd.DataFrame:
    return pd.DataFrame([row.row() for row in rows])


def coverage_table(rows: pd.DataFrame, by: list[str], flag: str = "covered") -> pd.DataFrame:
    """Coverage share per group over the rows that completed, with Wilson intervals"""
    done = rows["status"] == "ok"
    rows = rows.assign(done=done, hit=done & (rows[flag] == 1))
    summary = (
        rows.groupby(by, sort=True)
        .agg(covered=("hit", "sum"), replicates=("done", "sum"), total=("done", "size"))
        .reset_index()
    )
    summary["failed"] = summary.pop("total") - summary["replicates"]
    summary["coverage"] = summary["covered"] / summary["replicates"].where(summary["replicates"] > 0)
    bounds = [wilson_interval(s, c) for s, c in zip(summary["covered"], summary["replicates"])]
    summary["wilson_lo"] = [lo for lo, _ in bounds]
    summary["wilson_hi"] = [hi for _, hi in bounds]
    return summary


def write_csv(table: pd.DataFrame | list[Serializable], folder: Path, name: str) -> Path:
    if not isinstance(table, pd.DataFrame):
        table = frame(table)
    folder = Path(folder)
    folder.mkdir(parents=True, exist_ok=True)
    filepath = folder / f"{name}.csv"
    table.to_csv(filepath, index=False, float_format=FLOAT_FORMAT)
    return filepath


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
