"""Column typing, CSV ingestion and per-column statistics."""

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DataParseError, VersaMLError


class ColumnType(str, enum.Enum):
    continuous = "continuous"
    nominal = "nominal"
    ordinal = "ordinal"


class ColumnRole(str, enum.Enum):
    input = "input"
    output = "output"
    ignored = "ignored"


@dataclass
class ColumnStats:
    """Summary of a numeric column (population standard deviation)."""

    min: float
    max: float
    mean: float
    std: float
    count: int

    def to_dict(self):
        return {"min": self.min, "max": self.max, "mean": self.mean,
                "std": self.std, "count": self.count}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["min"]), float(d["max"]), float(d["mean"]),
                   float(d["std"]), int(d["count"]))


@dataclass
class ColumnDefinition:
    name: str
    source_index: int
    kind: ColumnType
    categories: list = field(default_factory=list)
    role: ColumnRole = ColumnRole.input
    stats: ColumnStats | None = None
    # ordinal columns may fix their rank order up front
    fixed_order: bool = False

    @property
    def is_categorical(self):
        return self.kind is not ColumnType.continuous

    def category_index(self, label, row=None):
        try:
            return self.categories.index(label)
        except ValueError:
            raise DataParseError(f"unknown category {label!r}", row=row, column=self.name) from None


def compute_stats(values):
    """Min, max, mean and population std of a sequence of reals.

    Sums are exact (``math.fsum``) so the result does not depend on row order.
    """
    values = [float(v) for v in values]
    if not values:
        raise VersaMLError("cannot compute statistics of an empty column")
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    lo, hi = min(values), max(values)
    # fsum rounding can nudge the mean a hair outside [min, max] for constant columns
    mean = min(max(mean, lo), hi)
    return ColumnStats(lo, hi, mean, math.sqrt(var), n)


def parse_real(text, row=None, column=None):
    cell = text.strip()
    if not cell:
        raise DataParseError("missing value", row=row, column=column)
    try:
        value = float(cell)
    except ValueError:
        raise DataParseError(f"non-numeric value {text!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise DataParseError(f"non-finite value {text!r}", row=row, column=column)
    return value


def read_csv(source, header=False):
    """Read comma-separated text with optional double-quote quoting.

    Parameters
    ----------
    source : str, Path or file-like
        A path, or an open text stream.
    header : bool
        Whether the first record holds column names.

    Returns
    -------
    names : list of str or None
    rows : list of list of str
        Blank lines are skipped; CRLF and LF line endings both work.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=",", quotechar='"',
                        doublequote=True, strict=True)
    try:
        records = [rec for rec in reader if rec and any(cell.strip() for cell in rec)]
    except csv.Error as exc:
        raise DataParseError(f"malformed CSV: {exc}", row=reader.line_num) from None
    names = None
    if header and records:
        names = [c.strip() for c in records[0]]
        records = records[1:]
    return names, records
