"""Model families sharing the compute / flat-parameter contract."""

from .activation import Activation, activation_apply, activation_derivative
from .base import RegressionModel
from .clustering import (KMeansModel, SomModel, kmeans_assign, kmeans_fit,
                         kmeans_plus_plus, som_bmu)
from .feedforward import (FeedforwardNetwork, feedforward_compute, feedforward_init,
                          weight_count)
from .knn import KnnModel, KnnTask, knn_predict
from .linear import GlmModel, LinearRegression, Link, glm_fit_irls, glm_predict, linreg_fit
from .rbf import RbfNetwork, rbf_compute, rbf_from_data

__all__ = [
    "Activation", "activation_apply", "activation_derivative", "RegressionModel",
    "KMeansModel", "SomModel", "kmeans_assign", "kmeans_fit", "kmeans_plus_plus", "som_bmu",
    "FeedforwardNetwork", "feedforward_compute", "feedforward_init", "weight_count",
    "KnnModel", "KnnTask", "knn_predict", "GlmModel", "LinearRegression", "Link",
    "glm_fit_irls", "glm_predict", "linreg_fit", "RbfNetwork", "rbf_compute", "rbf_from_data",
]
