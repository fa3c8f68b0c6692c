"""Backpropagated gradients and the propagation trainers."""

from .gradient import GradientResult, compute_gradient, mse
from .propagation import (TRAINERS, Backpropagation, BackpropConfig, BackpropState,
                          QuickpropConfig, QuickPropagation, QuickpropState,
                          ResilientPropagation, RpropConfig, RpropState,
                          ScaledConjugateGradient, ScgConfig, StopCondition,
                          TrainingHistory, backprop_iteration, backprop_update,
                          quickprop_iteration, quickprop_update, rprop_iteration,
                          rprop_update, scg_train, train_until)

__all__ = [
    "GradientResult", "compute_gradient", "mse", "TRAINERS", "Backpropagation",
    "BackpropConfig", "BackpropState", "QuickpropConfig", "QuickPropagation",
    "QuickpropState", "ResilientPropagation", "RpropConfig", "RpropState",
    "ScaledConjugateGradient", "ScgConfig", "StopCondition", "TrainingHistory",
    "backprop_iteration", "backprop_update", "quickprop_iteration", "quickprop_update",
    "rprop_iteration", "rprop_update", "scg_train", "train_until",
]
