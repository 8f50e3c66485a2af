from .critical import (
    CriticalRadiusReport,
    Regime,
    critical_radius_sq,
    theta_grid,
    transport_to_maximizers,
)
from .degeneracy import DegeneracyReport, degenerate_check

__all__ = [
    "CriticalRadiusReport",
    "DegeneracyReport",
    "Regime",
    "critical_radius_sq",
    "degenerate_check",
    "theta_grid",
    "transport_to_maximizers",
]
