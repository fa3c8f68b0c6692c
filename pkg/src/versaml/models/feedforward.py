"""Fully connected feedforward network stored as one flat weight vector.

Layout: transitions in order; within a transition, one row per target
neuron holding its source weights followed by its bias.
"""

import numpy as np

from ..errors import ConfigurationError
from .activation import Activation, activation_apply
from .base import RegressionModel, check_parameter_vector, dense


def weight_count(layer_sizes):
    return sum((src + 1) * dst for src, dst in zip(layer_sizes[:-1], layer_sizes[1:]))


class FeedforwardNetwork(RegressionModel):
    kind = "feedforward"

    def __init__(self, layer_sizes, activations, weights=None):
        layer_sizes = [int(s) for s in layer_sizes]
        if len(layer_sizes) < 2 or any(s < 1 for s in layer_sizes):
            raise ConfigurationError(f"invalid layer sizes {layer_sizes}")
        if isinstance(activations, (str, Activation)):
            activations = [activations] * (len(layer_sizes) - 1)
        activations = [Activation(a) for a in activations]
        if len(activations) != len(layer_sizes) - 1:
            raise ConfigurationError("need one activation per non-input layer")
        self.layer_sizes = layer_sizes
        self.activations = activations
        self.input_count = layer_sizes[0]
        self.output_count = layer_sizes[-1]
        n = weight_count(layer_sizes)
        self.weights = np.zeros(n) if weights is None else check_parameter_vector(weights, n).copy()

    @classmethod
    def random(cls, layer_sizes, activations, rng):
        """Weights drawn uniformly from [-1, 1] with the injected generator."""
        net = cls(layer_sizes, activations)
        net.weights = rng.uniform_array(net.weights.size, -1.0, 1.0)
        return net

    def layer_matrices(self, flat=None):
        """Views of ``flat`` (default: the weights) as (target, source + 1) matrices."""
        flat = self.weights if flat is None else flat
        mats = []
        pos = 0
        for src, dst in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            size = (src + 1) * dst
            mats.append(flat[pos:pos + size].reshape(dst, src + 1))
            pos += size
        return mats

    def forward(self, inputs):
        """Batch forward pass keeping every layer's pre-activation and output.

        Returns ``(pre_activations, outputs)`` where ``outputs[0]`` is the
        input batch itself.
        """
        outs = [inputs]
        pres = []
        a = inputs
        for mat, act in zip(self.layer_matrices(), self.activations):
            z = dense(a, mat)
            a = activation_apply(act, z)
            pres.append(z)
            outs.append(a)
        return pres, outs

    def compute_batch(self, inputs):
        inputs = self._check_batch(inputs)
        return self.forward(inputs)[1][-1]

    def get_parameters(self):
        return self.weights.copy()

    def set_parameters(self, params):
        self.weights = check_parameter_vector(params, self.weights.size).copy()

    def summary(self):
        acts = "/".join(a.value for a in self.activations)
        return f"FeedforwardNetwork({'-'.join(map(str, self.layer_sizes))}, {acts}, " \
               f"{self.weights.size} weights)"

    def to_dict(self):
        return {"layer_sizes": self.layer_sizes,
                "activations": [a.value for a in self.activations]}

    @classmethod
    def from_dict(cls, arch, params):
        return cls(arch["layer_sizes"], arch["activations"], params)


def feedforward_init(layer_sizes, activations, rng):
    return FeedforwardNetwork.random(layer_sizes, activations, rng)


def feedforward_compute(net, x):
    return net.compute(x)
