"""High-level workflow: pick a model kind, normalize, hold back, cross-validate, report.

Switching model families only means passing a different kind token to
:meth:`ModelPipeline.select_method`; normalization and training defaults
follow from the token.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset.columns import ColumnType
from .dataset.normalize import NormalizationStrategy as Strategy
from .dataset.pairs import as_pairset, holdback_indices, kfold_indices
from .errors import ConfigurationError, StageOrderError, UnsupportedCombinationError
from .gp import ConstantPolicy, GpConfig, GpModel, evolve
from .models import (FeedforwardNetwork, KnnModel, KnnTask, Link, SomModel, feedforward_init,
                     glm_fit_irls, kmeans_fit, linreg_fit, rbf_from_data)
from .optimize import (AnnealConfig, GaVectorConfig, PsoConfig, minimize_anneal, minimize_ga,
                       minimize_nelder_mead, minimize_pso, model_loss_objective)
from .parallel import ordered_map
from .persistence import dumps_model, save_model
from .rng import DeterministicRng
from .training import TRAINERS, StopCondition, mse, train_until
from .training.propagation import BackpropConfig, QuickpropConfig


class ModelKind(str, enum.Enum):
    feedforward = "feedforward"
    rbfnetwork = "rbfnetwork"
    linear = "linear"
    glm = "glm"
    knn = "knn"
    som = "som"
    kmeans = "kmeans"
    gp = "gp"


class Stage(enum.IntEnum):
    created = 0
    method_selected = 1
    normalized = 2
    held_back = 3
    trained = 4


NEURAL = (ModelKind.feedforward, ModelKind.rbfnetwork, ModelKind.gp)
STATISTICAL = (ModelKind.linear, ModelKind.glm, ModelKind.knn)
CLUSTERING = (ModelKind.som, ModelKind.kmeans)

DEFAULT_TRAINERS = {
    ModelKind.feedforward: "rprop",
    ModelKind.rbfnetwork: "rprop",
    ModelKind.linear: "normal_equations",
    ModelKind.glm: "irls",
    ModelKind.knn: "store",
    ModelKind.som: "kohonen",
    ModelKind.kmeans: "lloyd",
    ModelKind.gp: "evolve",
}

GRADIENT_TRAINERS = tuple(TRAINERS)
BLACKBOX_TRAINERS = ("pso", "anneal", "nelder_mead", "ga")

# override key -> converter
_OVERRIDES = {
    "hidden": lambda v: [int(x) for x in str(v).split(",")] if not isinstance(v, list) else v,
    "activation": str,
    "output_activation": str,
    "trainer": str,
    "max_epochs": int,
    "patience": int,
    "min_improvement": float,
    "target_error": float,
    "learning_rate": float,
    "momentum": float,
    "mu": float,
    "iterations": int,
    "units": int,
    "k": int,
    "rows": int,
    "cols": int,
    "som_iterations": int,
    "generations": int,
    "population": int,
    "parsimony": float,
    "chunk_size": int,
}


def parse_overrides(overrides):
    parsed = {}
    for key, value in (overrides or {}).items():
        if key not in _OVERRIDES:
            raise ConfigurationError(f"unknown setting {key!r}")
        try:
            parsed[key] = _OVERRIDES[key](value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"bad value {value!r} for setting {key!r}") from None
    return parsed


@dataclass
class FoldReport:
    fold: int
    training_error: float
    validation_error: float
    epochs: int


@dataclass
class TrainerChoice:
    name: str
    stop: StopCondition = field(default_factory=StopCondition)


def calculate_regression_error(model, pairs):
    """MSE over pairs and output components.

    For clustering models (no targets) this is the mean squared distance to
    the nearest centroid or unit, per input component.
    """
    pairs = as_pairset(pairs)
    if len(pairs) == 0:
        raise ConfigurationError("cannot compute an error over zero pairs")
    if pairs.ideal_count == 0:
        return model.quantization_error(pairs.inputs)
    return mse(model, pairs)


def _accuracy_counts(model, helper, pairs):
    enc = helper.outputs[0]
    n = len(enc.column.categories)
    confusion = np.zeros((n, n), dtype=int)
    outputs = model.compute_batch(pairs.inputs)
    for out, ideal in zip(outputs, pairs.ideals):
        confusion[enc.class_index(ideal), enc.class_index(out)] += 1
    return confusion


def classification_accuracy(model, helper, pairs):
    """Fraction of pairs whose decoded prediction matches the decoded target."""
    confusion = confusion_matrix(model, helper, pairs)
    return float(np.trace(confusion) / confusion.sum())


def confusion_matrix(model, helper, pairs):
    pairs = as_pairset(pairs)
    if not helper.is_classification:
        raise ConfigurationError("accuracy needs a single nominal output column")
    if len(pairs) == 0:
        raise ConfigurationError("cannot score zero pairs")
    return _accuracy_counts(model, helper, pairs)


class ModelPipeline:
    """Drives one dataset through model selection, training and reporting.

    Parameters
    ----------
    dataset : VersatileDataset
        Columns defined and analyzed.
    seed : int
        Base seed; holdback and fold shuffles use it, fold ``i`` initialises
        its model from ``seed + i``.
    workers : int
        Folds may train on this many threads; results do not depend on it.
    settings : dict, optional
        Hyperparameter overrides (see ``parse_overrides``).
    """

    def __init__(self, dataset, seed=1001, workers=1, settings=None):
        self.dataset = dataset
        self.seed = int(seed)
        self.workers = int(workers)
        self.settings = parse_overrides(settings)
        self.stage = Stage.created
        self.kind = None
        self.strategies = None
        self.pairs = None
        self.training_indices = None
        self.validation_indices = None
        self.training_set = None
        self.validation_set = None
        self.trainer = None
        self.best_model = None
        self.fold_reports = []
        self.fold_rows = []

    def _require(self, stage, action):
        if self.stage < stage:
            raise StageOrderError(f"{action} requires the {stage.name} stage "
                                  f"(pipeline is at {self.stage.name})")

    @property
    def helper(self):
        return self.dataset.helper

    def select_method(self, kind):
        """Install the normalization plan for ``kind``.

        Neural kinds (feedforward, rbfnetwork, gp) scale numeric inputs to
        [-1, 1], one-of-n encode nominal inputs with -1/1 and encode nominal
        targets equilaterally. linear, glm and knn z-score numeric inputs,
        use 0/1 one-of-n for nominal inputs and keep targets raw (class
        index for nominal targets). som and kmeans scale inputs to [0, 1]
        and ignore the target.
        """
        if not self.dataset.analyzed:
            raise StageOrderError("select_method requires an analyzed dataset")
        kind = ModelKind(kind)
        outputs = self.dataset.output_columns
        if kind not in CLUSTERING:
            if len(outputs) != 1:
                raise ConfigurationError(f"{kind.value} needs exactly one output column")
            out = outputs[0]
            if kind is ModelKind.glm and out.is_categorical and len(out.categories) > 2:
                raise UnsupportedCombinationError(
                    f"glm supports at most 2 output classes; {out.name} has {len(out.categories)}")
            if kind is ModelKind.gp and out.kind is ColumnType.nominal and len(out.categories) > 2:
                raise UnsupportedCombinationError(
                    f"gp evolves a single output; {out.name} has {len(out.categories)} classes")
        self.strategies = self._plan(kind)
        self.kind = kind
        self.stage = Stage.method_selected
        self.trainer = None
        return self.strategies

    def _plan(self, kind):
        plan = {}
        for col in self.dataset.input_columns:
            if kind in NEURAL:
                plan[col.name] = (Strategy.one_of_n(-1.0, 1.0) if col.kind is ColumnType.nominal
                                  else Strategy.range(-1.0, 1.0))
            elif kind in STATISTICAL:
                plan[col.name] = (Strategy.one_of_n(0.0, 1.0) if col.kind is ColumnType.nominal
                                  else Strategy.zscore())
            else:
                plan[col.name] = (Strategy.one_of_n(0.0, 1.0) if col.kind is ColumnType.nominal
                                  else Strategy.range(0.0, 1.0))
        if kind in CLUSTERING:
            return plan
        for col in self.dataset.output_columns:
            if kind in NEURAL:
                plan[col.name] = (Strategy.equilateral() if col.kind is ColumnType.nominal
                                  else Strategy.range(-1.0, 1.0))
            else:
                plan[col.name] = Strategy.passthrough()
        return plan

    def normalize(self):
        self._require(Stage.method_selected, "normalize")
        self.pairs = self.dataset.normalize(self.strategies,
                                            include_outputs=self.kind not in CLUSTERING)
        self.stage = Stage.normalized
        return self.pairs

    def holdback_validation(self, ratio=0.3, shuffle=True, seed=None):
        self._require(Stage.normalized, "holdback_validation")
        seed = self.seed if seed is None else int(seed)
        tr, va = holdback_indices(len(self.pairs), ratio, shuffle, seed)
        self.training_indices, self.validation_indices = tr, va
        self.training_set = self.pairs.subset(tr)
        self.validation_set = self.pairs.subset(va)
        self.holdback_seed = seed
        self.stage = Stage.held_back

    def select_training(self):
        """Default trainer for the kind, adjusted by ``trainer`` and stop settings."""
        self._require(Stage.method_selected, "select_training")
        s = self.settings
        name = s.get("trainer", DEFAULT_TRAINERS[self.kind])
        if self.kind in (ModelKind.feedforward, ModelKind.rbfnetwork):
            allowed = GRADIENT_TRAINERS + (BLACKBOX_TRAINERS if self.kind is ModelKind.feedforward
                                           else ())
            if name not in allowed:
                raise UnsupportedCombinationError(f"{self.kind.value} cannot use trainer {name!r}")
        elif name != DEFAULT_TRAINERS[self.kind]:
            raise UnsupportedCombinationError(f"{self.kind.value} only trains with "
                                              f"{DEFAULT_TRAINERS[self.kind]}")
        stop = StopCondition(max_epochs=s.get("max_epochs", 500), patience=s.get("patience", 50),
                             min_improvement=s.get("min_improvement", 1e-8),
                             target_error=s.get("target_error", 0.0))
        self.trainer = TrainerChoice(name, stop)
        return self.trainer

    # training ----------------------------------------------------------

    @property
    def is_classification(self):
        return self.helper is not None and self.helper.is_classification

    def _feedforward_architecture(self, n_in, n_out):
        s = self.settings
        hidden = s.get("hidden", [math.ceil((n_in + n_out) * 2 / 3) + 1])
        act = s.get("activation", "tanh")
        out_act = s.get("output_activation", "tanh" if self.is_classification else "linear")
        return [n_in] + list(hidden) + [n_out], [act] * len(hidden) + [out_act]

    def _gradient_trainer(self):
        s = self.settings
        name = self.trainer.name
        chunk = s.get("chunk_size", 64)
        if name == "backprop":
            cfg = BackpropConfig(s.get("learning_rate", 0.1), s.get("momentum", 0.0))
            return TRAINERS[name](cfg, chunk_size=chunk)
        if name == "quickprop":
            cfg = QuickpropConfig(s.get("learning_rate", 0.1), s.get("mu", 1.75))
            return TRAINERS[name](cfg, chunk_size=chunk)
        return TRAINERS[name](chunk_size=chunk)

    def _train_blackbox(self, net, pairs, rng):
        name = self.trainer.name
        objective = model_loss_objective(net, pairs)
        budget = self.settings.get("iterations", 200)
        dim = objective.dimension
        if name == "pso":
            res = minimize_pso(objective, PsoConfig(lo=-1.0, hi=1.0), rng, budget)
        elif name == "ga":
            res = minimize_ga(objective, GaVectorConfig(lo=-1.0, hi=1.0), rng, budget)
        elif name == "anneal":
            res = minimize_anneal(objective, net.weights, AnnealConfig(start_temp=1.0,
                                                                       end_temp=1e-4), rng)
        else:
            res = minimize_nelder_mead(objective, net.weights, max_iter=budget * dim)
        net.set_parameters(res.x)
        return net, res.iterations

    def _fit(self, pairs, seed):
        """Train a fresh model on ``pairs``; returns ``(model, epochs)``."""
        rng = DeterministicRng(seed)
        s = self.settings
        kind = self.kind
        if kind is ModelKind.feedforward:
            sizes, acts = self._feedforward_architecture(pairs.input_count, pairs.ideal_count)
            net = feedforward_init(sizes, acts, rng)
            if self.trainer.name in BLACKBOX_TRAINERS:
                return self._train_blackbox(net, pairs, rng)
            net, history = train_until(self._gradient_trainer(), net, pairs, self.trainer.stop)
            return net, history.epochs
        if kind is ModelKind.rbfnetwork:
            rbf = rbf_from_data(pairs.inputs, pairs.ideal_count, rng, s.get("units"))
            # frozen centers: the output layer is a single linear layer on the basis features
            layer = FeedforwardNetwork([rbf.units, rbf.output_count], "linear", rbf.weights)
            features = type(pairs)(rbf.features(pairs.inputs), pairs.ideals)
            layer, history = train_until(self._gradient_trainer(), layer, features,
                                         self.trainer.stop)
            rbf.set_parameters(layer.weights)
            return rbf, history.epochs
        if kind is ModelKind.linear:
            return linreg_fit(pairs), 0
        if kind is ModelKind.glm:
            out = self.dataset.output_columns[0]
            link = Link.logit if out.is_categorical else Link.identity
            model = glm_fit_irls(pairs, link)
            return model, model.iterations
        if kind is ModelKind.knn:
            task = KnnTask.classify if self.is_classification else KnnTask.regress
            k = min(s.get("k", 3), len(pairs))
            return KnnModel.fit(pairs, k, task), 0
        if kind is ModelKind.kmeans:
            k = s.get("k", self._default_clusters())
            model = kmeans_fit(pairs.inputs, k, rng)
            return model, len(model.inertia_history)
        if kind is ModelKind.som:
            rows, cols = s.get("rows", 4), s.get("cols", 4)
            iterations = s.get("som_iterations", 1000)
            model = SomModel.random(rows, cols, pairs.input_count, rng)
            model.train(pairs.inputs, rng, iterations)
            return model, iterations
        cfg = GpConfig(population=s.get("population", 256), parsimony=s.get("parsimony", 0.001))
        result = evolve(pairs, cfg, constants=ConstantPolicy(), rng=rng,
                        generations=s.get("generations", 50))
        return GpModel(result.best, pairs.input_count), result.generations

    def _default_clusters(self):
        outs = [c for c in self.dataset.output_columns if c.is_categorical]
        return len(outs[0].categories) if outs else 3

    def _check_training_ready(self):
        self._require(Stage.held_back, "training")
        if self.trainer is None:
            self.select_training()

    def crossvalidate(self, k=5, shuffle=True):
        """Train one model per fold of the training portion; keep the best.

        The returned model is the fold model with the lowest error on its
        own validation fold. Reports for every fold are kept in
        ``fold_reports``.
        """
        self._check_training_ready()
        n = len(self.training_set)
        if k < 2 or k > n:
            raise ConfigurationError(f"k-fold needs 2 <= k <= {n} training rows (k={k})")
        folds = kfold_indices(n, k, shuffle, self.holdback_seed)
        base = self.training_indices
        # fold membership as row numbers of the full dataset
        self.fold_rows = [([base[j] for j in tr], [base[j] for j in va]) for tr, va in folds]

        def run(i):
            tr, va = folds[i]
            train = self.training_set.subset(tr)
            valid = self.training_set.subset(va)
            model, epochs = self._fit(train, self.seed + i)
            report = FoldReport(i, calculate_regression_error(model, train),
                                calculate_regression_error(model, valid), epochs)
            return model, report

        results = ordered_map(run, range(k), self.workers)
        self.fold_reports = [r for _, r in results]
        best = min(range(k), key=lambda i: (self.fold_reports[i].validation_error, i))
        self.best_model = results[best][0]
        self.stage = Stage.trained
        return self.best_model

    def fit(self):
        """Train a single model on the whole training portion (no folds)."""
        self._check_training_ready()
        model, epochs = self._fit(self.training_set, self.seed)
        err = calculate_regression_error(model, self.training_set)
        self.fold_reports = [FoldReport(0, err, float("nan"), epochs)]
        self.best_model = model
        self.stage = Stage.trained
        return model

    # reporting ---------------------------------------------------------

    def report_normalization(self):
        self._require(Stage.normalized, "report_normalization")
        return str(self.helper)

    def training_error(self, model=None):
        self._require(Stage.held_back, "training_error")
        return calculate_regression_error(model or self.best_model, self.training_set)

    def validation_error(self, model=None):
        self._require(Stage.held_back, "validation_error")
        return calculate_regression_error(model or self.best_model, self.validation_set)

    def accuracy(self, pairs, model=None):
        return classification_accuracy(model or self.best_model, self.helper, pairs)

    def save(self, path):
        self._require(Stage.trained, "save")
        save_model(self.best_model, self.helper, path)

    def model_json(self):
        self._require(Stage.trained, "model_json")
        return dumps_model(self.best_model, self.helper)
