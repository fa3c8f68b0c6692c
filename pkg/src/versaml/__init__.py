"""Interchangeable machine learning models behind one compute/parameters contract."""

from importlib import resources

__version__ = "0.1.0"


def iris_path():
    """Path of the bundled 150-row iris CSV (no header, species in column 4)."""
    return resources.files("versaml") / "resources" / "iris.csv"
