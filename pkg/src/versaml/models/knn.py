"""k-nearest-neighbour classification and regression over stored pairs."""

import enum

import numpy as np

from ..dataset.pairs import as_pairset
from ..errors import ConfigurationError
from .base import RegressionModel, squared_distances


class KnnTask(str, enum.Enum):
    classify = "classify"
    regress = "regress"


class KnnModel(RegressionModel):
    """Lazy model: no parameters, just the stored training pairs.

    For classification the ideal column holds the class index and the
    output is the winning index. Distance ties go to the earlier stored
    pair; vote ties go to the smaller class index.
    """

    kind = "knn"

    def __init__(self, inputs, ideals, k=3, task=KnnTask.regress):
        self.inputs = np.array(inputs, dtype=float, ndmin=2)
        self.ideals = np.array(ideals, dtype=float, ndmin=2)
        if self.ideals.shape[0] != self.inputs.shape[0]:
            self.ideals = self.ideals.T
        self.k = int(k)
        self.task = KnnTask(task)
        if len(self.inputs) == 0:
            raise ConfigurationError("k-NN needs at least one stored pair")
        if not 1 <= self.k <= len(self.inputs):
            raise ConfigurationError(f"k={self.k} must lie in [1, {len(self.inputs)}]")
        if self.task is KnnTask.classify and self.ideals.shape[1] != 1:
            raise ConfigurationError("k-NN classification needs a single label column")
        self.input_count = self.inputs.shape[1]
        self.output_count = self.ideals.shape[1]

    @classmethod
    def fit(cls, pairs, k=3, task=KnnTask.regress):
        pairs = as_pairset(pairs)
        return cls(pairs.inputs.copy(), pairs.ideals.copy(), k, task)

    def neighbours(self, inputs):
        d2 = squared_distances(inputs, self.inputs)
        return np.argsort(d2, axis=1, kind="stable")[:, :self.k]

    def compute_batch(self, inputs):
        inputs = self._check_batch(inputs)
        idx = self.neighbours(inputs)
        if self.task is KnnTask.regress:
            return self.ideals[idx].mean(axis=1)
        out = np.empty((len(inputs), 1))
        for row, nb in enumerate(idx):
            labels = self.ideals[nb, 0].astype(int)
            counts = np.bincount(labels - labels.min())
            # argmax takes the first maximum, i.e. the smallest class index
            out[row, 0] = labels.min() + int(np.argmax(counts))
        return out

    def summary(self):
        return f"KnnModel(k={self.k}, task={self.task.value}, stored={len(self.inputs)})"

    def to_dict(self):
        return {"k": self.k, "task": self.task.value,
                "inputs": self.inputs.tolist(), "ideals": self.ideals.tolist()}

    @classmethod
    def from_dict(cls, arch, params):
        return cls(arch["inputs"], arch["ideals"], arch["k"], arch["task"])


def knn_predict(model, x):
    return model.compute(x)
