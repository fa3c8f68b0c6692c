"""Command-line interface: analyze, train, evaluate and predict from CSV files.

Exit codes: 0 success, 2 I/O, 3 parse, 4 configuration or unsupported
combination, 5 schema mismatch.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .dataset import PairSet, VersatileDataset, read_csv
from .errors import (ConfigurationError, DataParseError, ModelLoadError, SchemaMismatchError,
                     VersaMLError)
from .persistence import load_model
from .pipeline import (CLUSTERING, ModelKind, ModelPipeline, calculate_regression_error,
                       confusion_matrix)

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_CONFIG = 4
EXIT_SCHEMA = 5

DEFAULTS = {
    "header": False,
    "columns": [],
    "target": None,
    "model_kind": "feedforward",
    "seed": 1001,
    "holdback": 0.3,
    "folds": 5,
    "out": "model.json",
    "set": {},
    "workers": 1,
}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def parse_column_spec(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"column spec {text!r} is not name:index:kind")
    name, index, kind = parts
    try:
        index = int(index)
    except ValueError:
        raise ConfigurationError(f"column spec {text!r} has a non-integer index") from None
    return name, index, kind


def parse_settings(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"setting {item!r} is not key=value")
        out[key.strip()] = value.strip()
    return out


def resolve_config(args):
    """Defaults, then the JSON config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_PARSE, f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS) - {"data"}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(loaded)
        cfg["set"] = {k: str(v) for k, v in dict(cfg["set"]).items()}
    flags = {
        "data": getattr(args, "data", None),
        "header": getattr(args, "header", None),
        "columns": getattr(args, "col", None),
        "target": getattr(args, "target", None),
        "model_kind": getattr(args, "model_kind", None),
        "seed": getattr(args, "seed", None),
        "holdback": getattr(args, "holdback", None),
        "folds": getattr(args, "folds", None),
        "out": getattr(args, "out", None),
        "workers": getattr(args, "workers", None),
    }
    for key, value in flags.items():
        if value is not None:
            cfg[key] = value
    settings = getattr(args, "set", None)
    if settings:
        cfg["set"] = {**cfg["set"], **parse_settings(settings)}
    if not cfg.get("data"):
        raise ConfigurationError("no data file given (--data)")
    return cfg


def _read_rows(path, header):
    try:
        return read_csv(path, header=header)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"file not found: {path}") from None
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None
    except (csv.Error, UnicodeDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot parse {path}: {exc}") from None


def _infer_columns(names, rows):
    # without --col every column is typed from its cells
    width = max(len(r) for r in rows)
    specs = []
    for i in range(width):
        cells = [r[i] for r in rows if i < len(r)]
        try:
            [float(c) for c in cells]
            kind = "continuous"
        except ValueError:
            kind = "nominal"
        name = names[i] if names and i < len(names) else f"c{i}"
        specs.append((name, i, kind))
    return specs


def build_dataset(cfg, need_target=True):
    names, rows = _read_rows(cfg["data"], cfg["header"])
    if not rows:
        raise CliError(EXIT_PARSE, f"{cfg['data']} holds no data rows")
    ds = VersatileDataset(rows, names)
    specs = [parse_column_spec(c) if isinstance(c, str) else tuple(c) for c in cfg["columns"]]
    if not specs:
        specs = _infer_columns(names, rows)
    for name, index, kind in specs:
        try:
            ds.define_source_column(name, int(index), kind)
        except ValueError as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad column kind {kind!r} for {name}") from None
    target = cfg.get("target")
    if target is not None:
        ds.define_single_output(target)
    elif need_target:
        raise ConfigurationError("no target column given (--target)")
    ds.analyze()
    return ds


def _fmt(value):
    return repr(float(value))


def cmd_analyze(cfg, out):
    ds = build_dataset(cfg, need_target=False)
    out(f"{len(ds)} rows, {len(ds.columns)} columns")
    for col in ds.columns:
        s = col.stats
        line = (f"{col.name}: {col.kind.value}, index={col.source_index}, role={col.role.value}, "
                f"min={_fmt(s.min)} max={_fmt(s.max)} mean={_fmt(s.mean)} std={_fmt(s.std)}")
        if col.is_categorical:
            line += f", categories=[{', '.join(col.categories)}]"
        out(line)
    return EXIT_OK


def cmd_train(cfg, out):
    stage = "configuration"
    try:
        kind = ModelKind(cfg["model_kind"])
    except ValueError:
        raise ConfigurationError(f"unknown model kind {cfg['model_kind']!r}; choose from "
                                 + ", ".join(k.value for k in ModelKind)) from None
    try:
        stage = "analyze"
        ds = build_dataset(cfg, need_target=kind not in CLUSTERING)
        stage = "select_method"
        pipe = ModelPipeline(ds, seed=int(cfg["seed"]), workers=int(cfg["workers"]),
                             settings=cfg["set"])
        pipe.select_method(kind)
        stage = "normalize"
        pipe.normalize()
        stage = "holdback"
        pipe.holdback_validation(float(cfg["holdback"]), True, int(cfg["seed"]))
        stage = "select_training"
        choice = pipe.select_training()
        stage = "train"
        folds = int(cfg["folds"])
        if folds <= 1:
            pipe.fit()
        else:
            pipe.crossvalidate(folds, True)
    except CliError:
        raise
    except VersaMLError as exc:
        exc.args = (f"{stage}: {exc}",)
        raise
    out(f"Model kind: {kind.value}, trainer: {choice.name}")
    out("fold  training_mse  validation_mse  epochs")
    for r in pipe.fold_reports:
        out(f"{r.fold}  {_fmt(r.training_error)}  {_fmt(r.validation_error)}  {r.epochs}")
    out(f"Training error: {_fmt(pipe.training_error())}")
    if len(pipe.validation_set):
        out(f"Validation error: {_fmt(pipe.validation_error())}")
        if pipe.is_classification and kind not in CLUSTERING:
            out(f"Validation accuracy: {_fmt(pipe.accuracy(pipe.validation_set))}")
    else:
        out("Validation error: n/a (no rows held back)")
    out("Normalization:")
    out(pipe.report_normalization())
    out(f"Final model: {pipe.best_model.summary()}")
    try:
        pipe.save(cfg["out"])
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {cfg['out']}: {exc.strerror}") from None
    out(f"Saved model to {cfg['out']}")
    return EXIT_OK


def _load(path):
    try:
        return load_model(path)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"file not found: {path}") from None
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None


def _check_width(rows, helper):
    need = helper.source_width
    for r, row in enumerate(rows, start=1):
        if len(row) < need:
            raise SchemaMismatchError(f"row {r} has {len(row)} columns; "
                                      f"the model needs at least {need}")


def cmd_evaluate(args, out):
    model, helper = _load(args.model)
    if helper is None:
        raise SchemaMismatchError("model file carries no normalization plan")
    _, rows = _read_rows(args.data, args.header)
    if not rows:
        raise CliError(EXIT_PARSE, f"{args.data} holds no data rows")
    _check_width(rows, helper)
    inputs = [helper.encode_input(row, row=r) for r, row in enumerate(rows, start=1)]
    ideals = [helper.encode_ideal(row, row=r) for r, row in enumerate(rows, start=1)]
    pairs = PairSet(inputs, ideals)
    out(f"Rows: {len(pairs)}")
    out(f"MSE: {_fmt(calculate_regression_error(model, pairs))}")
    if helper.is_classification:
        cm = confusion_matrix(model, helper, pairs)
        out(f"Accuracy: {_fmt(np.trace(cm) / cm.sum())}")
        labels = helper.outputs[0].column.categories
        out("Confusion matrix (rows = actual, columns = predicted):")
        out("\t" + "\t".join(labels))
        for label, counts in zip(labels, cm):
            out(label + "\t" + "\t".join(str(int(c)) for c in counts))
    return EXIT_OK


def _format_prediction(model, helper, vector):
    if not helper.outputs:
        return str(int(vector[0]))
    decoded = helper.decode_output(vector)
    return ",".join(v if isinstance(v, str) else _fmt(v) for v in decoded)


def cmd_predict(args, out):
    model, helper = _load(args.model)
    if helper is None:
        raise SchemaMismatchError("model file carries no normalization plan")
    if args.row is not None:
        rows = [next(csv.reader([args.row]))]
    elif args.data is not None:
        _, rows = _read_rows(args.data, args.header)
    else:
        raise ConfigurationError("give --row or --data")
    n_inputs = len(helper.inputs)
    encoded = []
    for r, row in enumerate(rows, start=1):
        if len(row) == n_inputs:
            encoded.append(helper.encode_inputs_only(row, row=r))
        elif len(row) >= helper.source_width:
            encoded.append(helper.encode_input(row, row=r))
        else:
            raise SchemaMismatchError(f"row {r} has {len(row)} cells; expected {n_inputs} "
                                      f"input cells or a full row of {helper.source_width}")
    if not encoded:
        return EXIT_OK
    outputs = model.compute_batch(np.array(encoded))
    for vector in outputs:
        out(_format_prediction(model, helper, vector))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="versaml", description=__doc__.splitlines()[0])
    parser.add_argument("--quiet", action="store_true", help="suppress the version banner")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_flags(p, required_data=False):
        p.add_argument("--data", required=required_data, help="CSV file")
        p.add_argument("--header", action="store_true", default=None,
                       help="first CSV line holds column names")

    def dataset_flags(p):
        data_flags(p)
        p.add_argument("--col", action="append", metavar="NAME:INDEX:KIND",
                       help="define a source column (continuous, nominal or ordinal)")
        p.add_argument("--target", help="output column name")
        p.add_argument("--config", help="JSON file mirroring the flags; flags win")

    p = sub.add_parser("analyze", help="print per-column statistics")
    dataset_flags(p)

    p = sub.add_parser("train", help="normalize, hold back, cross-validate and save a model")
    dataset_flags(p)
    p.add_argument("--model-kind", choices=[k.value for k in ModelKind])
    p.add_argument("--seed", type=int)
    p.add_argument("--holdback", type=float, help="validation fraction (default 0.3)")
    p.add_argument("--folds", type=int, help="cross-validation folds; 1 fits once (default 5)")
    p.add_argument("--out", help="model file to write (default model.json)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="hyperparameter override")
    p.add_argument("--workers", type=int, help="threads for fold training (default 1)")

    p = sub.add_parser("evaluate", help="score a saved model on a CSV file")
    p.add_argument("--model", required=True)
    data_flags(p, required_data=True)

    p = sub.add_parser("predict", help="decode predictions for CSV rows")
    p.add_argument("--model", required=True)
    data_flags(p)
    p.add_argument("--row", help="one comma-separated row")
    return parser


def run(argv, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    def out(line):
        print(line, file=stdout)

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if not args.quiet:
        out(f"versaml {__version__}")
    try:
        if args.command == "analyze":
            return cmd_analyze(resolve_config(args), out)
        if args.command == "train":
            return cmd_train(resolve_config(args), out)
        if args.header is None:
            args.header = False
        if args.command == "evaluate":
            return cmd_evaluate(args, out)
        return cmd_predict(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.code
    except SchemaMismatchError as exc:
        print(f"schema mismatch: {exc}", file=stderr)
        return EXIT_SCHEMA
    except (DataParseError, ModelLoadError) as exc:
        print(f"parse error: {exc}", file=stderr)
        return EXIT_PARSE
    except (VersaMLError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv)
