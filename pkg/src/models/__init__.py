from .loss_model import (
    FAMILIES,
    BoundsKind,
    ConstantLoss,
    KernelRidgeLoss,
    LinearRegressionLoss,
    LogisticLoss,
    LossFamily,
    LossModel,
    ThetaBounds,
    argmax_set,
    loss_eval,
    loss_grads,
    make_model,
    numerical_argmax,
)

__all__ = [
    "FAMILIES",
    "BoundsKind",
    "ConstantLoss",
    "KernelRidgeLoss",
    "LinearRegressionLoss",
    "LogisticLoss",
    "LossFamily",
    "LossModel",
    "ThetaBounds",
    "argmax_set",
    "loss_eval",
    "loss_grads",
    "make_model",
    "numerical_argmax",
]
