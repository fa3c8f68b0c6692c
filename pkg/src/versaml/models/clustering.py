"""k-means clustering and the self-organizing map."""

import math

import numpy as np

from ..errors import ConfigurationError
from .base import RegressionModel, check_parameter_vector, nearest_index, squared_distances


class KMeansModel(RegressionModel):
    """Centroid model; ``compute`` returns the assigned cluster index."""

    kind = "kmeans"
    output_count = 1

    def __init__(self, centroids):
        centroids = np.array(centroids, dtype=float, ndmin=2)
        if centroids.shape[0] < 1:
            raise ConfigurationError("k-means needs at least one centroid")
        self.centroids = centroids
        self.input_count = centroids.shape[1]
        self.inertia_history = []

    @property
    def k(self):
        return self.centroids.shape[0]

    def assign_batch(self, inputs):
        return np.argmin(squared_distances(inputs, self.centroids), axis=1)

    def assign(self, x):
        x = self._check_input(x)
        return nearest_index(squared_distances(x[None, :], self.centroids)[0])

    def compute_batch(self, inputs):
        inputs = self._check_batch(inputs)
        return self.assign_batch(inputs).astype(float)[:, None]

    def quantization_error(self, inputs):
        """Mean squared distance to the nearest centroid, per input component."""
        d = squared_distances(inputs, self.centroids).min(axis=1)
        return float(d.sum() / (len(inputs) * self.input_count))

    def inertia(self, inputs):
        return float(squared_distances(inputs, self.centroids).min(axis=1).sum())

    def get_parameters(self):
        return self.centroids.ravel().copy()

    def set_parameters(self, params):
        self.centroids = check_parameter_vector(params, self.centroids.size).reshape(
            self.centroids.shape).copy()

    def to_dict(self):
        return {"k": self.k, "input_count": self.input_count}

    @classmethod
    def from_dict(cls, arch, params):
        return cls(np.asarray(params, dtype=float).reshape(arch["k"], arch["input_count"]))


def kmeans_plus_plus(inputs, k, rng):
    """Seeding by squared-distance sampling; distinct points where possible."""
    n = len(inputs)
    chosen = [rng.next_range(0, n - 1)]
    d2 = squared_distances(inputs, inputs[chosen]).min(axis=1)
    while len(chosen) < k:
        total = math.fsum(d2)
        if total <= 0:
            remaining = [i for i in range(n) if i not in chosen] or list(range(n))
            chosen.append(remaining[rng.next_range(0, len(remaining) - 1)])
        else:
            target = rng.next_double() * total
            acc = 0.0
            pick = n - 1
            for i in range(n):
                acc += d2[i]
                if acc > target and d2[i] > 0:
                    pick = i
                    break
            chosen.append(pick)
        d2 = np.minimum(d2, squared_distances(inputs, inputs[chosen[-1:]])[:, 0])
    return inputs[chosen].copy()


def kmeans_fit(inputs, k, rng, max_iter=100):
    """Lloyd iterations from k-means++ seeds.

    Records the inertia after every assignment step in
    ``model.inertia_history``; a cluster that loses all its points keeps its
    previous centroid.
    """
    inputs = np.asarray(inputs, dtype=float)
    if not 1 <= k <= len(inputs):
        raise ConfigurationError(f"k-means needs 1 <= k <= N (k={k}, N={len(inputs)})")
    model = KMeansModel(kmeans_plus_plus(inputs, k, rng))
    labels = None
    for _ in range(max_iter):
        new_labels = model.assign_batch(inputs)
        model.inertia_history.append(model.inertia(inputs))
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        for j in range(k):
            members = inputs[labels == j]
            if len(members):
                model.centroids[j] = members.mean(axis=0)
    else:
        model.inertia_history.append(model.inertia(inputs))
    return model


def kmeans_assign(model, x):
    return model.assign(x)


class SomModel(RegressionModel):
    """Rectangular Kohonen map; ``compute`` returns the row-major BMU index."""

    kind = "som"
    output_count = 1

    def __init__(self, rows, cols, weights):
        if rows < 1 or cols < 1:
            raise ConfigurationError("SOM grid dimensions must be positive")
        weights = np.array(weights, dtype=float, ndmin=2)
        if weights.shape[0] != rows * cols:
            raise ConfigurationError(f"expected {rows * cols} unit vectors, got {weights.shape[0]}")
        self.rows = int(rows)
        self.cols = int(cols)
        self.weights = weights
        self.input_count = weights.shape[1]

    @classmethod
    def random(cls, rows, cols, input_count, rng, lo=0.0, hi=1.0):
        w = rng.uniform_array(rows * cols * input_count, lo, hi).reshape(rows * cols, input_count)
        return cls(rows, cols, w)

    def unit_index(self, x):
        return nearest_index(squared_distances(x[None, :], self.weights)[0])

    def bmu(self, x):
        x = self._check_input(x)
        return divmod(self.unit_index(x), self.cols)

    def compute_batch(self, inputs):
        inputs = self._check_batch(inputs)
        return np.argmin(squared_distances(inputs, self.weights), axis=1).astype(float)[:, None]

    def quantization_error(self, inputs):
        d = squared_distances(inputs, self.weights).min(axis=1)
        return float(d.sum() / (len(inputs) * self.input_count))

    def train(self, inputs, rng, iterations=1000, learning_rate=0.5, final_rate=0.01):
        """Online Kohonen training on randomly drawn inputs.

        The learning rate decays linearly to ``final_rate``; the Gaussian
        neighbourhood radius shrinks exponentially from half the grid size
        to 0.5.
        """
        inputs = np.asarray(inputs, dtype=float)
        grid = np.array([divmod(i, self.cols) for i in range(self.rows * self.cols)], dtype=float)
        radius0 = max(self.rows, self.cols) / 2.0
        radius_end = 0.5
        for t in range(iterations):
            frac = t / max(iterations - 1, 1)
            rate = learning_rate + (final_rate - learning_rate) * frac
            radius = max(radius0, radius_end) * (radius_end / max(radius0, radius_end)) ** frac
            x = inputs[rng.next_range(0, len(inputs) - 1)]
            r, c = divmod(self.unit_index(x), self.cols)
            g2 = ((grid - (r, c)) ** 2).sum(axis=1)
            influence = np.exp(-g2 / (2.0 * radius * radius))
            self.weights += rate * influence[:, None] * (x - self.weights)
        return self

    def get_parameters(self):
        return self.weights.ravel().copy()

    def set_parameters(self, params):
        self.weights = check_parameter_vector(params, self.weights.size).reshape(
            self.weights.shape).copy()

    def to_dict(self):
        return {"rows": self.rows, "cols": self.cols, "input_count": self.input_count}

    @classmethod
    def from_dict(cls, arch, params):
        w = np.asarray(params, dtype=float).reshape(arch["rows"] * arch["cols"], arch["input_count"])
        return cls(arch["rows"], arch["cols"], w)


def som_bmu(model, x):
    return model.bmu(x)
