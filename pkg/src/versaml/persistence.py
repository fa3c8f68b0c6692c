"""JSON model files: architecture, flat parameters and the normalization plan."""

import json
from pathlib import Path

import numpy as np

from .dataset.normalize import NormalizationHelper
from .errors import ModelLoadError
from .gp.evolve import GpModel
from .models import (FeedforwardNetwork, GlmModel, KMeansModel, KnnModel, LinearRegression,
                     RbfNetwork, SomModel)

FORMAT_VERSION = 1

MODEL_TYPES = {
    "feedforward": FeedforwardNetwork,
    "rbfnetwork": RbfNetwork,
    "linear": LinearRegression,
    "glm": GlmModel,
    "knn": KnnModel,
    "som": SomModel,
    "kmeans": KMeansModel,
    "gp": GpModel,
}


def model_document(model, helper=None):
    return {
        "format_version": FORMAT_VERSION,
        "model_kind": model.kind,
        "architecture": model.to_dict(),
        "parameters": [float(v) for v in model.get_parameters()],
        "normalization": None if helper is None else helper.to_dict(),
    }


def dumps_model(model, helper=None):
    # json writes floats with repr(), the shortest text that parses back exactly
    return json.dumps(model_document(model, helper), indent=2) + "\n"


def save_model(model, helper, path):
    Path(path).write_text(dumps_model(model, helper), encoding="utf-8")


def loads_model(text, expected_kind=None):
    """Rebuild ``(model, helper)`` from a JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"malformed model file: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelLoadError("model file must hold a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelLoadError(f"unsupported format version {version!r}")
    kind = doc.get("model_kind")
    if kind not in MODEL_TYPES:
        raise ModelLoadError(f"unknown model kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise ModelLoadError(f"expected a {expected_kind} model, file holds {kind}")
    try:
        params = np.array(doc["parameters"], dtype=float)
        model = MODEL_TYPES[kind].from_dict(doc["architecture"], params)
        norm = doc.get("normalization")
        helper = None if norm is None else NormalizationHelper.from_dict(norm)
    except ModelLoadError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelLoadError(f"invalid {kind} model document: {exc}") from None
    return model, helper


def load_model(path, expected_kind=None):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ModelLoadError(f"model file is not UTF-8 text: {exc}") from None
    return loads_model(text, expected_kind)
