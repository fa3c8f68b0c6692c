"""Gaussian radial-basis-function network with a linear output layer."""

import math

import numpy as np

from ..errors import ConfigurationError
from .base import RegressionModel, check_parameter_vector, dense, squared_distances
from .clustering import kmeans_fit


class RbfNetwork(RegressionModel):
    """Centers and widths are fixed structure; the parameters are the
    output weights, ``(units + 1) * output_count`` values with the bias last
    in each output row.
    """

    kind = "rbfnetwork"

    def __init__(self, centers, widths, output_count, weights=None):
        centers = np.array(centers, dtype=float, ndmin=2)
        widths = np.array(widths, dtype=float).ravel()
        if widths.shape[0] != centers.shape[0]:
            raise ConfigurationError("need one width per center")
        if np.any(widths <= 0):
            raise ConfigurationError("RBF widths must be positive")
        self.centers = centers
        self.widths = widths
        self.input_count = centers.shape[1]
        self.output_count = int(output_count)
        n = (self.units + 1) * self.output_count
        self.weights = np.zeros(n) if weights is None else check_parameter_vector(weights, n).copy()

    @property
    def units(self):
        return self.centers.shape[0]

    def features(self, inputs):
        """Basis activations ``exp(-|x - c|^2 / (2 sigma^2))``, shape (N, units)."""
        d2 = squared_distances(inputs, self.centers)
        return np.exp(-d2 / (2.0 * self.widths * self.widths))

    def output_matrix(self):
        return self.weights.reshape(self.output_count, self.units + 1)

    def compute_batch(self, inputs):
        inputs = self._check_batch(inputs)
        return dense(self.features(inputs), self.output_matrix())

    def get_parameters(self):
        return self.weights.copy()

    def set_parameters(self, params):
        self.weights = check_parameter_vector(params, self.weights.size).copy()

    def summary(self):
        return f"RbfNetwork({self.input_count} inputs, {self.units} units, " \
               f"{self.output_count} outputs)"

    def to_dict(self):
        return {"centers": self.centers.tolist(), "widths": self.widths.tolist(),
                "output_count": self.output_count}

    @classmethod
    def from_dict(cls, arch, params):
        return cls(arch["centers"], arch["widths"], arch["output_count"], params)


def rbf_from_data(inputs, output_count, rng, units=None):
    """Place ``ceil(sqrt(N))`` centers by k-means; widths ``d_max / sqrt(2 units)``.

    ``d_max`` is the largest distance between two centers. Output weights
    start uniform in [-1, 1].
    """
    inputs = np.asarray(inputs, dtype=float)
    if units is None:
        units = math.ceil(math.sqrt(len(inputs)))
    units = max(1, min(int(units), len(inputs)))
    centers = kmeans_fit(inputs, units, rng).centroids
    d_max = math.sqrt(float(squared_distances(centers, centers).max())) if units > 1 else 0.0
    width = d_max / math.sqrt(2.0 * units) if d_max > 0 else 1.0
    net = RbfNetwork(centers, np.full(units, width), output_count)
    net.weights = rng.uniform_array(net.weights.size, -1.0, 1.0)
    return net


def rbf_compute(model, x):
    return model.compute(x)
