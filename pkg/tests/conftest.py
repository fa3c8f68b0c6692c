import sys

import numpy as np
import pytest

from versaml import iris_path
from versaml.dataset import VersatileDataset

IRIS_COLUMNS = ["sepal-length", "sepal-width", "petal-length", "petal-width"]


def iris_dataset():
    data = VersatileDataset.from_csv(iris_path())
    for i, name in enumerate(IRIS_COLUMNS):
        data.define_source_column(name, i, "continuous")
    species = data.define_source_column("species", 4, "nominal")
    data.define_single_output(species)
    data.analyze()
    return data


def regression_rows(n=120, seed=0):
    """Noisy plane y = 2a - b + 0.5 as CSV text cells."""
    gen = np.random.default_rng(seed)
    x = gen.uniform(-1.0, 1.0, (n, 2))
    y = 2.0 * x[:, 0] - x[:, 1] + 0.5 + 0.01 * gen.normal(size=n)
    return [[repr(float(a)), repr(float(b)), repr(float(t))] for (a, b), t in zip(x, y)]


def regression_dataset(n=120, seed=0):
    data = VersatileDataset(regression_rows(n, seed), ["a", "b", "y"])
    data.define_source_column("a", 0, "continuous")
    data.define_source_column("b", 1, "continuous")
    data.define_source_column("y", 2, "continuous")
    data.define_single_output("y")
    data.analyze()
    return data


@pytest.fixture
def iris():
    return iris_dataset()


@pytest.fixture
def regression():
    return regression_dataset()


@pytest.fixture
def regression_csv(tmp_path):
    path = tmp_path / "plane.csv"
    path.write_text("".join(",".join(r) + "\n" for r in regression_rows()))
    return path


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
