from .robust_risk import (
    LAMBDA_MAX,
    DualObjective,
    DualPoint,
    RobustRiskResult,
    lambda_init,
    lambda_model_minimizer,
    robust_risk,
)
from .training import OptBudget, TrainResult, train_robust
from .true_risk import RiskEstimate, Sampler, true_risk

__all__ = [
    "LAMBDA_MAX",
    "DualObjective",
    "DualPoint",
    "OptBudget",
    "RiskEstimate",
    "RobustRiskResult",
    "Sampler",
    "TrainResult",
    "lambda_init",
    "lambda_model_minimizer",
    "robust_risk",
    "train_robust",
    "true_risk",
]
