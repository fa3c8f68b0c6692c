"""Normalization strategies, categorical codes and the encode/decode helper."""

import functools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, ConstantColumnError, DataParseError
from .columns import ColumnDefinition, ColumnRole, ColumnStats, ColumnType, parse_real


@dataclass(frozen=True)
class NormalizationStrategy:
    """How one column is mapped to model inputs or targets.

    Build instances with the class-level constructors :meth:`range`,
    :meth:`zscore`, :meth:`one_of_n`, :meth:`equilateral` and
    :meth:`passthrough`.
    """

    name: str
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if self.name not in ("range", "zscore", "one_of_n", "equilateral", "passthrough"):
            raise ConfigurationError(f"unknown normalization strategy {self.name!r}")
        if self.name == "range" and not self.lo < self.hi:
            raise ConfigurationError("range normalization needs lo < hi")
        if self.name == "one_of_n" and self.lo == self.hi:
            raise ConfigurationError("one-of-n encoding needs off != on")

    @classmethod
    def range(cls, lo=-1.0, hi=1.0):
        return cls("range", float(lo), float(hi))

    @classmethod
    def zscore(cls):
        return cls("zscore", 0.0, 0.0)

    @classmethod
    def one_of_n(cls, off=-1.0, on=1.0):
        # lo holds the "off" level, hi the "on" level
        return cls("one_of_n", float(off), float(on))

    @classmethod
    def equilateral(cls):
        return cls("equilateral", 0.0, 0.0)

    @classmethod
    def passthrough(cls):
        return cls("passthrough", 0.0, 0.0)

    @property
    def off(self):
        return self.lo

    @property
    def on(self):
        return self.hi

    def __str__(self):
        if self.name == "range":
            return f"range[{self.lo:g},{self.hi:g}]"
        if self.name == "one_of_n":
            return f"one_of_n[{self.lo:g},{self.hi:g}]"
        return self.name

    def to_dict(self):
        return {"name": self.name, "lo": self.lo, "hi": self.hi}

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], float(d.get("lo", -1.0)), float(d.get("hi", 1.0)))


def normalize_value(x, stats, strategy):
    if strategy.name == "range":
        if not stats.max > stats.min:
            raise ConstantColumnError("range normalization of a constant column")
        return (x - stats.min) * (strategy.hi - strategy.lo) / (stats.max - stats.min) + strategy.lo
    if strategy.name == "zscore":
        if stats.std == 0:
            raise ConstantColumnError("z-score normalization of a column with zero deviation")
        return (x - stats.mean) / stats.std
    raise ConfigurationError(f"{strategy} is not a numeric normalization")


def denormalize_value(v, stats, strategy):
    if strategy.name == "range":
        if not stats.max > stats.min:
            raise ConstantColumnError("range normalization of a constant column")
        return (v - strategy.lo) * (stats.max - stats.min) / (strategy.hi - strategy.lo) + stats.min
    if strategy.name == "zscore":
        if stats.std == 0:
            raise ConstantColumnError("z-score normalization of a column with zero deviation")
        return v * stats.std + stats.mean
    raise ConfigurationError(f"{strategy} is not a numeric normalization")


def encode_one_of_n(class_index, n, off=-1.0, on=1.0):
    if n < 2:
        raise ValueError("one-of-n encoding needs at least two classes")
    if not 0 <= class_index < n:
        raise ValueError(f"class index {class_index} outside [0, {n})")
    out = np.full(n, float(off))
    out[class_index] = on
    return out


@functools.lru_cache(maxsize=64)
def _equilateral(n):
    codes = np.zeros((n, n - 1))
    codes[0, 0] = -1.0
    codes[1, 0] = 1.0
    for k in range(2, n):
        codes[:k, :k - 1] *= math.sqrt(k * k - 1.0) / k
        codes[:k, k - 1] = -1.0 / k
        codes[k, k - 1] = 1.0
    codes.setflags(write=False)
    return codes


def equilateral_matrix(n):
    """Unit-norm simplex codes for ``n`` classes, one row per class.

    Every pair of rows is the same distance apart. The result is a fresh
    ``(n, n - 1)`` array.
    """
    if n < 2:
        raise ValueError("equilateral encoding needs at least two classes")
    return _equilateral(int(n)).copy()


# distances closer than this are treated as ties (smallest index wins)
_TIE_TOLERANCE = 1e-12


def equilateral_decode(v, n):
    v = np.asarray(v, dtype=float)
    if v.shape != (n - 1,):
        raise ValueError(f"expected a code of length {n - 1}, got shape {v.shape}")
    codes = _equilateral(int(n))
    dist = np.sqrt(((codes - v) ** 2).sum(axis=1))
    best = 0
    for i in range(1, n):
        if dist[i] < dist[best] - _TIE_TOLERANCE:
            best = i
    return best


class ColumnEncoder:
    """Fitted strategy for one column: encodes cells, decodes model values."""

    def __init__(self, column, strategy):
        self.column = column
        self.strategy = strategy
        kind = column.kind
        if strategy.name in ("one_of_n", "equilateral") and kind is not ColumnType.nominal:
            raise ConfigurationError(f"{strategy} applies only to nominal columns ({column.name})")
        if strategy.name in ("range", "zscore") and kind is ColumnType.nominal:
            raise ConfigurationError(f"{strategy} cannot encode nominal column {column.name}")
        if kind is not ColumnType.continuous and len(column.categories) == 0:
            raise ConfigurationError(f"column {column.name} has no categories; analyze first")
        if strategy.name in ("range", "zscore") and column.stats is None:
            raise ConfigurationError(f"column {column.name} has no statistics; analyze first")
        if strategy.name in ("one_of_n", "equilateral") and len(column.categories) < 2:
            raise ConfigurationError(f"column {column.name} needs at least two categories")

    @property
    def name(self):
        return self.column.name

    @property
    def width(self):
        s = self.strategy.name
        if s == "one_of_n":
            return len(self.column.categories)
        if s == "equilateral":
            return len(self.column.categories) - 1
        return 1

    @property
    def is_categorical(self):
        return self.column.is_categorical

    def raw_value(self, cell, row=None):
        """Numeric value of a cell before normalization (category rank for categorical)."""
        if self.column.kind is ColumnType.continuous:
            return parse_real(cell, row=row, column=self.column.name)
        label = cell.strip()
        if not label:
            raise DataParseError("missing value", row=row, column=self.column.name)
        return self.column.category_index(label, row=row)

    def encode_value(self, value):
        s = self.strategy
        if s.name in ("range", "zscore"):
            return [normalize_value(float(value), self.column.stats, s)]
        if s.name == "one_of_n":
            return list(encode_one_of_n(int(value), len(self.column.categories), s.off, s.on))
        if s.name == "equilateral":
            n = len(self.column.categories)
            return list(_equilateral(n)[int(value)])
        return [float(value)]

    def encode(self, cell, row=None):
        return self.encode_value(self.raw_value(cell, row=row))

    def decode(self, values):
        """Map model output back to source units, or to a category label."""
        values = np.asarray(values, dtype=float)
        s = self.strategy
        cats = self.column.categories
        if s.name == "one_of_n":
            return cats[int(np.argmax(values))]
        if s.name == "equilateral":
            return cats[equilateral_decode(values, len(cats))]
        value = float(values[0])
        if s.name in ("range", "zscore"):
            value = denormalize_value(value, self.column.stats, s)
        if self.is_categorical:
            index = min(max(int(round(value)), 0), len(cats) - 1)
            return cats[index]
        return value

    def class_index(self, values):
        """Category rank predicted by ``values`` (categorical columns only)."""
        label = self.decode(values)
        return self.column.categories.index(label)

    def describe(self):
        col = self.column
        parts = [f"{col.name}: {col.kind.value}", f"role={col.role.value}", str(self.strategy)]
        if col.stats is not None and self.strategy.name in ("range", "zscore", "passthrough"):
            st = col.stats
            parts.append(f"min={st.min!r} max={st.max!r} mean={st.mean!r} std={st.std!r}")
        if col.categories:
            parts.append("categories=[" + ", ".join(col.categories) + "]")
        parts.append(f"width={self.width}")
        return ", ".join(parts)

    def to_dict(self):
        col = self.column
        return {
            "name": col.name,
            "source_index": col.source_index,
            "kind": col.kind.value,
            "role": col.role.value,
            "categories": list(col.categories),
            "stats": None if col.stats is None else col.stats.to_dict(),
            "strategy": self.strategy.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        col = ColumnDefinition(
            name=d["name"],
            source_index=int(d["source_index"]),
            kind=ColumnType(d["kind"]),
            categories=list(d.get("categories") or []),
            role=ColumnRole(d["role"]),
            stats=None if d.get("stats") is None else ColumnStats.from_dict(d["stats"]),
        )
        return cls(col, NormalizationStrategy.from_dict(d["strategy"]))


class NormalizationHelper:
    """Per-column encoders for model inputs and outputs.

    Turns raw text rows into flat input/ideal vectors and decodes model
    outputs back to labels or source units.
    """

    def __init__(self, inputs, outputs):
        self.inputs = list(inputs)
        self.outputs = list(outputs)

    @property
    def input_width(self):
        return sum(e.width for e in self.inputs)

    @property
    def output_width(self):
        return sum(e.width for e in self.outputs)

    @property
    def columns(self):
        return self.inputs + self.outputs

    @property
    def source_width(self):
        """Minimum number of cells a raw row must have."""
        return 1 + max(e.column.source_index for e in self.columns)

    @property
    def is_classification(self):
        return len(self.outputs) == 1 and self.outputs[0].is_categorical

    def encode_input(self, cells, row=None):
        values = []
        for enc in self.inputs:
            values.extend(enc.encode(cells[enc.column.source_index], row=row))
        return np.array(values, dtype=float)

    def encode_ideal(self, cells, row=None):
        values = []
        for enc in self.outputs:
            values.extend(enc.encode(cells[enc.column.source_index], row=row))
        return np.array(values, dtype=float)

    def encode_inputs_only(self, cells, row=None):
        """Encode a row holding just the input columns, in input order."""
        if len(cells) != len(self.inputs):
            raise ValueError(f"expected {len(self.inputs)} input cells, got {len(cells)}")
        values = []
        for enc, cell in zip(self.inputs, cells):
            values.extend(enc.encode(cell, row=row))
        return np.array(values, dtype=float)

    def decode_output(self, vector):
        out = []
        pos = 0
        for enc in self.outputs:
            out.append(enc.decode(vector[pos:pos + enc.width]))
            pos += enc.width
        return out

    def target_class(self, vector):
        return self.outputs[0].class_index(vector)

    def __str__(self):
        return "\n".join(enc.describe() for enc in self.columns)

    def to_dict(self):
        return {"inputs": [e.to_dict() for e in self.inputs],
                "outputs": [e.to_dict() for e in self.outputs]}

    @classmethod
    def from_dict(cls, d):
        return cls([ColumnEncoder.from_dict(x) for x in d["inputs"]],
                   [ColumnEncoder.from_dict(x) for x in d["outputs"]])
