"""Exception hierarchy shared by every versaml module."""


class VersaMLError(Exception):
    """Base class for library errors."""


class ConfigurationError(VersaMLError, ValueError):
    """Invalid column definitions, hyperparameters or argument combinations."""


class UnsupportedCombinationError(ConfigurationError):
    """A model kind cannot handle the dataset as configured."""


class DataParseError(VersaMLError, ValueError):
    """A cell could not be interpreted; carries its location."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ConstantColumnError(VersaMLError, ValueError):
    """Range or z-score normalization requested on a column with no spread."""


class StageOrderError(VersaMLError, RuntimeError):
    """A pipeline stage was invoked before its prerequisites."""


class ModelLoadError(VersaMLError, ValueError):
    """A persisted model document could not be reconstructed."""


class SchemaMismatchError(VersaMLError, ValueError):
    """Input data does not match the columns a model was trained on."""
