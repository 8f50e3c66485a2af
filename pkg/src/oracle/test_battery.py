import pytest

from .battery import CheckRow, run_battery


def test_row_serializes_pass_flag():
    row = CheckRow.compare("dual_vs_grid", 0, reference=1.0, estimate=1.0005, tolerance=1e-3)
    assert row.passed
    assert row.row()["pass"] is True
    assert not CheckRow.compare("dual_vs_grid", 1, 1.0, 1.1, 1e-3).passed


@pytest.mark.filterwarnings("ignore::errors.LowEffectiveSampleSize")
def test_small_battery_passes():
    rows = run_battery(seed=0, instances=3, samples=100_000)
    assert len(rows) == 12
    assert [row.check_name for row in rows[::3]] == [
        "dual_vs_grid",
        "laplace_vs_quadrature",
        "phi_vs_quadrature",
        "regularized_transport_limit",
    ]
    failed = [(row.check_name, row.instance) for row in rows if not row.passed]
    assert failed == []
