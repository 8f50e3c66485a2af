from .generator import (
    PhiBatch,
    PhiEstimate,
    ReferenceCache,
    gibbs_batch,
    phi,
    phi_batch,
    phi_dlambda,
    start_points,
)
from .laplace import phi_laplace
from .params import DualParams, GibbsBatch, MonteCarloBudget

__all__ = [
    "DualParams",
    "GibbsBatch",
    "MonteCarloBudget",
    "PhiBatch",
    "PhiEstimate",
    "ReferenceCache",
    "gibbs_batch",
    "phi",
    "phi_batch",
    "phi_dlambda",
    "phi_laplace",
    "start_points",
]
