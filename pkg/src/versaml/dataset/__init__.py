"""Column typing, analysis, normalization/encoding and seeded data splits."""

from .columns import (ColumnDefinition, ColumnRole, ColumnStats, ColumnType,
                      compute_stats, read_csv)
from .normalize import (ColumnEncoder, NormalizationHelper, NormalizationStrategy,
                        denormalize_value, encode_one_of_n, equilateral_decode,
                        equilateral_matrix, normalize_value)
from .pairs import (DataPair, PairSet, as_pairset, kfold, kfold_indices,
                    split_holdback, window_time_series)
from .versatile import VersatileDataset

__all__ = [
    "ColumnDefinition", "ColumnRole", "ColumnStats", "ColumnType", "compute_stats",
    "read_csv", "ColumnEncoder", "NormalizationHelper", "NormalizationStrategy",
    "denormalize_value", "encode_one_of_n", "equilateral_decode", "equilateral_matrix",
    "normalize_value", "DataPair", "PairSet", "as_pairset", "kfold", "kfold_indices",
    "split_holdback", "window_time_series", "VersatileDataset",
]
