"""Encoded input/ideal pairs stored as two flat 2-D arrays, plus splitting."""

import math
from typing import NamedTuple

import numpy as np

from ..rng import DeterministicRng


class DataPair(NamedTuple):
    input: np.ndarray
    ideal: np.ndarray


def _as_matrix(values):
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(len(arr), 1 if len(arr) else 0)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    return arr


class PairSet:
    """Batch of training pairs: ``inputs`` is (N, in), ``ideals`` is (N, out)."""

    def __init__(self, inputs, ideals=None):
        inputs = _as_matrix(inputs)
        ideals = np.zeros((inputs.shape[0], 0)) if ideals is None else _as_matrix(ideals)
        if inputs.shape[0] != ideals.shape[0]:
            raise ValueError(f"{inputs.shape[0]} inputs but {ideals.shape[0]} ideals")
        self.inputs = inputs
        self.ideals = ideals

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls(np.zeros((0, 0)), np.zeros((0, 0)))
        return cls(np.array([p[0] for p in pairs], dtype=float),
                   np.array([p[1] for p in pairs], dtype=float))

    @property
    def input_count(self):
        return self.inputs.shape[1]

    @property
    def ideal_count(self):
        return self.ideals.shape[1]

    def __len__(self):
        return self.inputs.shape[0]

    def __getitem__(self, i):
        return DataPair(self.inputs[i], self.ideals[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def subset(self, indices):
        idx = np.asarray(indices, dtype=int)
        return PairSet(self.inputs[idx].reshape(len(idx), self.input_count),
                       self.ideals[idx].reshape(len(idx), self.ideal_count))

    def __eq__(self, other):
        if not isinstance(other, PairSet):
            return NotImplemented
        return (self.inputs.shape == other.inputs.shape
                and self.ideals.shape == other.ideals.shape
                and np.array_equal(self.inputs, other.inputs)
                and np.array_equal(self.ideals, other.ideals))

    def __repr__(self):
        return f"PairSet(n={len(self)}, inputs={self.input_count}, ideals={self.ideal_count})"


def as_pairset(pairs):
    if isinstance(pairs, PairSet):
        return pairs
    return PairSet.from_pairs(pairs)


def holdback_count(n, ratio):
    # tiny slack so 0.3 * 150 style products are not floored to 44
    return int(math.floor(ratio * n + 1e-9))


def split_holdback(pairs, ratio, shuffle=True, seed=1001):
    """Split off ``floor(ratio * N)`` pairs for validation.

    When ``shuffle`` is set the rows are permuted with a generator seeded by
    ``seed`` first; the validation block is the tail of that order.

    Returns
    -------
    (training, validation) : tuple of PairSet
    """
    training, validation = holdback_indices(len(pairs), ratio, shuffle, seed)
    pairs = as_pairset(pairs)
    return pairs.subset(training), pairs.subset(validation)


def holdback_indices(n, ratio, shuffle=True, seed=1001):
    if not 0 <= ratio < 1:
        raise ValueError(f"holdback ratio must lie in [0, 1), got {ratio}")
    order = list(range(n))
    if shuffle:
        order = DeterministicRng(seed).shuffle(order)
    cut = n - holdback_count(n, ratio)
    return order[:cut], order[cut:]


def kfold_indices(n, k, shuffle=True, seed=1001):
    """Contiguous folds over the (optionally shuffled) row order.

    Fold sizes differ by at most one, larger folds first. Returns a list of
    ``(train_indices, validation_indices)``.
    """
    if k < 2 or k > n:
        raise ValueError(f"k-fold needs 2 <= k <= N (k={k}, N={n})")
    order = list(range(n))
    if shuffle:
        order = DeterministicRng(seed).shuffle(order)
    base, extra = divmod(n, k)
    splits = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        validation = order[start:start + size]
        training = order[:start] + order[start + size:]
        splits.append((training, validation))
        start += size
    return splits


def kfold(pairs, k, shuffle=True, seed=1001):
    pairs = as_pairset(pairs)
    return [(pairs.subset(tr), pairs.subset(va))
            for tr, va in kfold_indices(len(pairs), k, shuffle, seed)]


def window_time_series(series, input_window, predict_window):
    """Slide a window over a series to build prediction pairs.

    ``series`` may hold scalars or equal-length vectors; each window is
    flattened in time order.

    >>> [p.input.tolist() for p in window_time_series([1, 2, 3, 4, 5], 3, 1)]
    [[1.0, 2.0, 3.0], [2.0, 3.0, 4.0]]
    """
    data = np.asarray(series, dtype=float)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    n = data.shape[0]
    if input_window < 1 or predict_window < 1:
        raise ValueError("window sizes must be at least 1")
    if input_window + predict_window > n:
        raise ValueError(f"windows {input_window}+{predict_window} exceed series length {n}")
    count = n - input_window - predict_window + 1
    inputs = np.array([data[t:t + input_window].ravel() for t in range(count)])
    ideals = np.array([data[t + input_window:t + input_window + predict_window].ravel()
                       for t in range(count)])
    return PairSet(inputs, ideals)
