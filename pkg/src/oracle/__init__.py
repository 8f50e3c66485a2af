from .battery import (
    CheckRow,
    dual_vs_grid,
    laplace_vs_quadrature,
    phi_vs_quadrature,
    regularized_transport_limit,
    run_battery,
)
from .grid_dual import Grid, GridDualResult, grid_dual_exact, grid_dual_values
from .quadrature import gibbs_cost_quadrature, phi_quadrature
from .transport import EntropicCoupling, entropic_coupling, reg_wass_sq, wass_sq_1d

__all__ = [
    "CheckRow",
    "EntropicCoupling",
    "Grid",
    "GridDualResult",
    "dual_vs_grid",
    "entropic_coupling",
    "gibbs_cost_quadrature",
    "grid_dual_exact",
    "grid_dual_values",
    "laplace_vs_quadrature",
    "phi_quadrature",
    "phi_vs_quadrature",
    "reg_wass_sq",
    "regularized_transport_limit",
    "run_battery",
    "wass_sq_1d",
]
