"""The shared model contract and a few array kernels every model uses."""

import copy

import numpy as np

from ..errors import ConfigurationError


def dense(inputs, weights):
    """Affine map of a batch through a (targets, sources + 1) bias-last matrix.

    Each output element is reduced over a contiguous run of its own row, so
    the value for a given row never depends on how many rows are in the batch.
    """
    prod = inputs[:, None, :] * weights[None, :, :-1]
    return prod.sum(axis=2) + weights[:, -1]


def squared_distances(inputs, points):
    """(N, M) squared Euclidean distances, row-size independent."""
    diff = inputs[:, None, :] - points[None, :, :]
    return (diff * diff).sum(axis=2)


def nearest_index(sq_dist):
    """Index of the smallest entry; the first one wins on exact ties."""
    return int(np.argmin(sq_dist))


class RegressionModel:
    """Common contract: ``compute`` plus flat parameter access.

    Subclasses implement :meth:`compute_batch`, :meth:`get_parameters`,
    :meth:`set_parameters` and the ``to_dict``/``from_dict`` pair used for
    persistence.
    """

    kind = None
    input_count = 0
    output_count = 0

    def _check_input(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.input_count,):
            raise ValueError(f"{type(self).__name__} expects {self.input_count} inputs, "
                             f"got shape {x.shape}")
        return x

    def _check_batch(self, inputs):
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim != 2 or inputs.shape[1] != self.input_count:
            raise ValueError(f"{type(self).__name__} expects (N, {self.input_count}) inputs, "
                             f"got shape {inputs.shape}")
        return inputs

    def compute(self, x):
        x = self._check_input(x)
        return self.compute_batch(x[None, :])[0]

    def compute_batch(self, inputs):
        raise NotImplementedError

    def get_parameters(self):
        return np.zeros(0)

    def set_parameters(self, params):
        params = np.asarray(params, dtype=float)
        if params.size != 0:
            raise ConfigurationError(f"{type(self).__name__} has no parameters")

    @property
    def parameter_count(self):
        return int(self.get_parameters().size)

    def copy(self):
        return copy.deepcopy(self)

    def with_parameters(self, params):
        clone = self.copy()
        clone.set_parameters(params)
        return clone

    def to_dict(self):
        raise NotImplementedError

    def summary(self):
        return f"{type(self).__name__}(inputs={self.input_count}, outputs={self.output_count}, " \
               f"parameters={self.parameter_count})"

    def __str__(self):
        return self.summary()


def check_parameter_vector(params, expected):
    params = np.asarray(params, dtype=float).ravel()
    if params.size != expected:
        raise ConfigurationError(f"expected {expected} parameters, got {params.size}")
    return params
