"""The dataset hub: raw rows, column definitions, analysis and encoding."""

from ..errors import ConfigurationError, DataParseError, StageOrderError, VersaMLError
from .columns import (ColumnDefinition, ColumnRole, ColumnType, compute_stats,
                      parse_real, read_csv)
from .normalize import ColumnEncoder, NormalizationHelper
from .pairs import PairSet


class VersatileDataset:
    """Raw text rows plus the column definitions that give them meaning.

    Typical use::

        data = VersatileDataset.from_csv("iris.csv")
        data.define_source_column("sepal-length", 0, ColumnType.continuous)
        ...
        species = data.define_source_column("species", 4, ColumnType.nominal)
        data.analyze()
        data.define_single_output(species)
        pairs = data.normalize({"sepal-length": NormalizationStrategy.range(), ...})
    """

    def __init__(self, rows, names=None):
        self.rows = [list(r) for r in rows]
        self.names = names
        self.columns = []
        self.analyzed = False
        self.helper = None
        self.pairs = None

    @classmethod
    def from_csv(cls, source, header=False):
        names, rows = read_csv(source, header=header)
        return cls(rows, names)

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        for col in self.columns:
            if col.name == name:
                return col
        raise ConfigurationError(f"no column named {name!r}")

    def define_source_column(self, name, index, kind, categories=None):
        kind = ColumnType(kind)
        if index < 0:
            raise ConfigurationError(f"negative source index {index}")
        if any(c.source_index == index for c in self.columns):
            raise ConfigurationError(f"source index {index} is already defined")
        if any(c.name == name for c in self.columns):
            raise ConfigurationError(f"column name {name!r} is already defined")
        col = ColumnDefinition(name=name, source_index=index, kind=kind)
        if categories is not None:
            if kind is ColumnType.continuous:
                raise ConfigurationError("continuous columns take no category list")
            col.categories = list(categories)
            col.fixed_order = True
        self.columns.append(col)
        self.helper = None
        self.pairs = None
        return col

    def define_single_output(self, column):
        if isinstance(column, str):
            column = self.column(column)
        if not any(c is column for c in self.columns):
            raise ConfigurationError(f"column {column.name!r} is not defined on this dataset")
        for col in self.columns:
            col.role = ColumnRole.output if col is column else ColumnRole.input

    @property
    def input_columns(self):
        return [c for c in self.columns if c.role is ColumnRole.input]

    @property
    def output_columns(self):
        return [c for c in self.columns if c.role is ColumnRole.output]

    def analyze(self):
        """Fill in statistics and category lists for every defined column."""
        if not self.rows:
            raise VersaMLError("cannot analyze an empty dataset")
        if not self.columns:
            raise ConfigurationError("define columns before analyze")
        width = 1 + max(c.source_index for c in self.columns)
        for r, row in enumerate(self.rows, start=1):
            if len(row) < width:
                raise DataParseError(f"expected at least {width} cells, found {len(row)}", row=r)
        for col in self.columns:
            cells = [row[col.source_index] for row in self.rows]
            if col.kind is ColumnType.continuous:
                values = [parse_real(cell, row=r, column=col.name)
                          for r, cell in enumerate(cells, start=1)]
                col.stats = compute_stats(values)
                continue
            if not col.fixed_order:
                seen = {}
                for r, cell in enumerate(cells, start=1):
                    label = cell.strip()
                    if not label:
                        raise DataParseError("missing value", row=r, column=col.name)
                    seen.setdefault(label, None)
                col.categories = list(seen)
            ranks = [col.category_index(cell.strip(), row=r)
                     for r, cell in enumerate(cells, start=1)]
            col.stats = compute_stats(ranks)
        self.analyzed = True

    def build_helper(self, strategies, include_outputs=True):
        """Fit encoders for input and output columns.

        ``strategies`` maps column name to :class:`NormalizationStrategy`;
        every input column (and output column, unless ``include_outputs`` is
        false) needs an entry.
        """
        if not self.analyzed:
            raise StageOrderError("analyze must run before normalize")
        outputs = self.output_columns if include_outputs else []
        encoders = {}
        for col in self.input_columns + outputs:
            if col.name not in strategies:
                raise ConfigurationError(f"no normalization strategy for column {col.name!r}")
            encoders[col.name] = ColumnEncoder(col, strategies[col.name])
        return NormalizationHelper([encoders[c.name] for c in self.input_columns],
                                   [encoders[c.name] for c in outputs])

    def normalize(self, strategies, include_outputs=True):
        helper = self.build_helper(strategies, include_outputs)
        inputs = []
        ideals = []
        for r, row in enumerate(self.rows, start=1):
            inputs.append(helper.encode_input(row, row=r))
            ideals.append(helper.encode_ideal(row, row=r))
        self.helper = helper
        self.pairs = PairSet(inputs, ideals)
        return self.pairs
