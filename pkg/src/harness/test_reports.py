import math

import pandas as pd
import pytest

from .reports import coverage_table, wilson_interval, write_csv


@pytest.mark.parametrize("successes, trials", [(0, 10), (7, 10), (10, 10), (180, 200)])
def test_wilson_interval_contains_the_share(successes, trials):
    lo, hi = wilson_interval(successes, trials)
    assert 0.0 <= lo <= successes / trials <= hi <= 1.0


def test_wilson_interval_known_value():
    lo, hi = wilson_interval(9, 10)
    assert lo == pytest.approx(0.5958, abs=1e-4)
    assert hi == pytest.approx(0.9821, abs=1e-4)


def test_wilson_interval_without_trials():
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_coverage_table_skips_failed_rows():
    rows = pd.DataFrame(
        dict(
            rho=[0.1, 0.1, 0.1, 0.2, 0.2],
            covered=[1, 0, 0, 1, 1],
            status=["ok", "ok", "failed:NumericFailure", "ok", "ok"],
        )
    )
    summary = coverage_table(rows, ["rho"]).set_index("rho")
    assert summary.loc[0.1, "covered"] == 1
    assert summary.loc[0.1, "replicates"] == 2
    assert summary.loc[0.1, "failed"] == 1
    assert summary.loc[0.1, "coverage"] == 0.5
    assert summary.loc[0.2, "coverage"] == 1.0


def test_coverage_table_all_failed_is_nan():
    rows = pd.DataFrame(dict(rho=[0.1], covered=[0], status=["failed:SamplingStalled"]))
    summary = coverage_table(rows, ["rho"])
    assert math.isnan(summary["coverage"].iloc[0])


def test_write_csv_keeps_nine_digits(tmp_path):
    path = write_csv(pd.DataFrame(dict(value=[1 / 3])), tmp_path / "out", "table")
    assert path.read_text().splitlines() == ["value", "0.333333333"]
