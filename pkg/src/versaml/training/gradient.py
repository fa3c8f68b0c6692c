"""Backpropagated batch gradients of the mean squared error."""

from dataclasses import dataclass

import numpy as np

from ..dataset.pairs import as_pairset
from ..models.activation import activation_derivative
from ..parallel import ordered_map

DEFAULT_CHUNK_SIZE = 64


@dataclass
class GradientResult:
    gradient: np.ndarray
    sum_squared_error: float
    pair_count: int
    output_count: int

    @property
    def error(self):
        """Mean squared error over pairs and output components."""
        return self.sum_squared_error / (self.pair_count * self.output_count)


def _check(net, pairs):
    if len(pairs) == 0:
        raise ValueError("cannot compute a gradient over an empty batch")
    if pairs.input_count != net.input_count or pairs.ideal_count != net.output_count:
        raise ValueError(f"batch is {pairs.input_count}->{pairs.ideal_count}, network is "
                         f"{net.input_count}->{net.output_count}")


def _chunk_contributions(net, inputs, ideals, scale):
    """Per-pair gradient rows and squared errors for one chunk.

    Nothing is summed across pairs here, so each row is the same whatever
    chunk it was computed in.
    """
    pres, outs = net.forward(inputs)
    diff = outs[-1] - ideals
    sq = (diff * diff).sum(axis=1)
    delta = (2.0 * scale) * diff * activation_derivative(net.activations[-1], pres[-1])
    mats = net.layer_matrices()
    n = inputs.shape[0]
    grads = [None] * len(mats)
    for layer in range(len(mats) - 1, -1, -1):
        prev = outs[layer]
        g = np.empty((n,) + mats[layer].shape)
        g[:, :, :-1] = delta[:, :, None] * prev[:, None, :]
        g[:, :, -1] = delta
        grads[layer] = g.reshape(n, -1)
        if layer:
            back = delta[:, :, None] * mats[layer][None, :, :-1]
            back = np.ascontiguousarray(back.transpose(0, 2, 1)).sum(axis=2)
            delta = back * activation_derivative(net.activations[layer - 1], pres[layer - 1])
    return np.hstack(grads), sq


def compute_gradient(net, batch, chunk_size=DEFAULT_CHUNK_SIZE, workers=1, weights=None):
    """Gradient of ``E = sum((y - t)^2) / (N * m)`` with respect to the weights.

    The batch is cut into fixed chunks of ``chunk_size`` pairs that may be
    evaluated on ``workers`` threads. Chunks hand back their per-pair
    contributions, which are stacked in ascending chunk order and reduced
    once, so the result is bit-identical for every chunk size and worker
    count.

    Parameters
    ----------
    weights : ndarray, optional
        Evaluate at this weight vector instead of ``net.weights``.
    """
    pairs = as_pairset(batch)
    _check(net, pairs)
    if weights is not None:
        net = net.with_parameters(weights)
    n = len(pairs)
    scale = 1.0 / (n * net.output_count)
    chunk_size = max(1, int(chunk_size))
    bounds = [(s, min(s + chunk_size, n)) for s in range(0, n, chunk_size)]

    def work(bound):
        lo, hi = bound
        return _chunk_contributions(net, pairs.inputs[lo:hi], pairs.ideals[lo:hi], scale)

    parts = ordered_map(work, bounds, workers)
    rows = np.vstack([p[0] for p in parts])
    sq = np.concatenate([p[1] for p in parts])
    return GradientResult(rows.sum(axis=0), float(sq.sum()), n, net.output_count)


def mse(model, batch):
    """Mean squared error of any model over a batch."""
    pairs = as_pairset(batch)
    if len(pairs) == 0:
        raise ValueError("cannot compute an error over an empty batch")
    diff = model.compute_batch(pairs.inputs) - pairs.ideals
    sq = (diff * diff).sum(axis=1)
    return float(sq.sum() / (len(pairs) * pairs.ideal_count))
