"""Full-batch propagation trainers: backprop, iRPROP-, quickprop and SCG.

Each trainer exposes ``iteration(net, batch)``, which updates ``net`` in
place and returns the error measured *before* the update. The per-weight
update rules are also available as plain functions on vectors.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..dataset.pairs import as_pairset
from ..errors import ConfigurationError
from .gradient import DEFAULT_CHUNK_SIZE, compute_gradient, mse


@dataclass
class BackpropConfig:
    learning_rate: float = 0.1
    momentum: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ConfigurationError("momentum must lie in [0, 1)")


@dataclass
class RpropConfig:
    eta_plus: float = 1.2
    eta_minus: float = 0.5
    delta_initial: float = 0.1
    delta_min: float = 1e-6
    delta_max: float = 50.0

    def __post_init__(self):
        if not 0 < self.eta_minus < 1 < self.eta_plus:
            raise ConfigurationError("RPROP needs 0 < eta_minus < 1 < eta_plus")
        if not self.delta_min < self.delta_initial < self.delta_max:
            raise ConfigurationError("RPROP needs delta_min < delta_initial < delta_max")


@dataclass
class QuickpropConfig:
    learning_rate: float = 0.1
    mu: float = 1.75

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning rate must be positive")
        if self.mu <= 1:
            raise ConfigurationError("quickprop growth factor mu must exceed 1")


@dataclass
class ScgConfig:
    sigma: float = 1e-4
    lambda_initial: float = 1e-6

    def __post_init__(self):
        if self.sigma <= 0 or self.lambda_initial <= 0:
            raise ConfigurationError("SCG sigma and lambda must be positive")


@dataclass
class BackpropState:
    previous_delta: np.ndarray | None = None


@dataclass
class RpropState:
    deltas: np.ndarray | None = None
    previous_gradient: np.ndarray | None = None


@dataclass
class QuickpropState:
    previous_gradient: np.ndarray | None = None
    previous_delta: np.ndarray | None = None


def backprop_update(weights, gradient, config, state):
    delta = -config.learning_rate * gradient
    if state.previous_delta is not None and config.momentum:
        delta = delta + config.momentum * state.previous_delta
    state.previous_delta = delta
    return weights + delta


def rprop_update(weights, gradient, config, state):
    """iRPROP-: adapt each step size by gradient sign agreement.

    On a sign change the step shrinks, the weight stays put and the stored
    gradient is zeroed so the next epoch counts as a fresh start.
    """
    if state.deltas is None:
        state.deltas = np.full(weights.shape, config.delta_initial)
        state.previous_gradient = np.zeros(weights.shape)
    g = gradient.copy()
    change = state.previous_gradient * g
    grow = change > 0
    shrink = change < 0
    state.deltas[grow] = np.minimum(state.deltas[grow] * config.eta_plus, config.delta_max)
    state.deltas[shrink] = np.maximum(state.deltas[shrink] * config.eta_minus, config.delta_min)
    g[shrink] = 0.0
    state.previous_gradient = g
    return weights - np.sign(g) * state.deltas


def quickprop_update(weights, gradient, config, state):
    g = gradient
    fallback = -config.learning_rate * g
    if state.previous_delta is None:
        delta = fallback
    else:
        prev_d = state.previous_delta
        prev_g = state.previous_gradient
        denom = prev_g - g
        use_parabola = (prev_d != 0) & (denom != 0)
        safe = np.where(use_parabola, denom, 1.0)
        step = prev_d * g / safe
        limit = config.mu * np.abs(prev_d)
        step = np.clip(step, -limit, limit)
        delta = np.where(use_parabola, step, fallback)
    state.previous_gradient = g.copy()
    state.previous_delta = delta
    return weights + delta


class _GradientTrainer:
    def __init__(self, config=None, chunk_size=DEFAULT_CHUNK_SIZE, workers=1):
        self.config = config if config is not None else self.config_type()
        self.state = self.state_type()
        self.chunk_size = chunk_size
        self.workers = workers

    def iteration(self, net, batch):
        result = compute_gradient(net, batch, self.chunk_size, self.workers)
        net.set_parameters(self.update(net.weights, result.gradient, self.config, self.state))
        return result.error


class Backpropagation(_GradientTrainer):
    name = "backprop"
    config_type = BackpropConfig
    state_type = BackpropState
    update = staticmethod(backprop_update)


class ResilientPropagation(_GradientTrainer):
    name = "rprop"
    config_type = RpropConfig
    state_type = RpropState
    update = staticmethod(rprop_update)


class QuickPropagation(_GradientTrainer):
    name = "quickprop"
    config_type = QuickpropConfig
    state_type = QuickpropState
    update = staticmethod(quickprop_update)


def backprop_iteration(net, batch, config, state, chunk_size=DEFAULT_CHUNK_SIZE, workers=1):
    result = compute_gradient(net, batch, chunk_size, workers)
    net.set_parameters(backprop_update(net.weights, result.gradient, config, state))
    return net, result.error


def rprop_iteration(net, batch, config, state, chunk_size=DEFAULT_CHUNK_SIZE, workers=1):
    result = compute_gradient(net, batch, chunk_size, workers)
    net.set_parameters(rprop_update(net.weights, result.gradient, config, state))
    return net, result.error


def quickprop_iteration(net, batch, config, state, chunk_size=DEFAULT_CHUNK_SIZE, workers=1):
    result = compute_gradient(net, batch, chunk_size, workers)
    net.set_parameters(quickprop_update(net.weights, result.gradient, config, state))
    return net, result.error


@dataclass
class _ScgState:
    gradient: np.ndarray
    error: float
    r: np.ndarray
    p: np.ndarray
    lam: float
    lam_bar: float = 0.0
    delta: float = 0.0
    success: bool = True
    successes: int = 0


class ScaledConjugateGradient:
    """Moller's scaled conjugate gradient.

    One call to :meth:`iteration` is one pass of the algorithm: a curvature
    estimate from a finite gradient difference along the search direction,
    a trust-region style adjustment of the scale ``lambda``, and a step that
    is taken only when it lowers the error. The direction restarts from the
    steepest descent every ``len(weights)`` successful steps.
    """

    name = "scg"

    def __init__(self, config=None, chunk_size=DEFAULT_CHUNK_SIZE, workers=1):
        self.config = config if config is not None else ScgConfig()
        self.chunk_size = chunk_size
        self.workers = workers
        self.state = None
        self.converged = False

    def _gradient(self, net, batch, weights=None):
        return compute_gradient(net, batch, self.chunk_size, self.workers, weights)

    def iteration(self, net, batch):
        batch = as_pairset(batch)
        cfg = self.config
        if self.state is None:
            res = self._gradient(net, batch)
            r = -res.gradient
            self.state = _ScgState(res.gradient, res.error, r, r.copy(), cfg.lambda_initial)
        st = self.state
        error_before = st.error
        if self.converged or not np.any(st.r):
            self.converged = True
            return error_before
        w = net.weights
        pp = float(st.p @ st.p)
        if st.success:
            sigma_k = cfg.sigma / math.sqrt(pp)
            g_plus = self._gradient(net, batch, w + sigma_k * st.p).gradient
            s = (g_plus - st.gradient) / sigma_k
            st.delta = float(st.p @ s)
        st.delta += (st.lam - st.lam_bar) * pp
        if st.delta <= 0:
            st.lam_bar = 2.0 * (st.lam - st.delta / pp)
            st.delta = -st.delta + st.lam * pp
            st.lam = st.lam_bar
        mu = float(st.p @ st.r)
        alpha = mu / st.delta
        candidate = w + alpha * st.p
        error_new = mse(net.with_parameters(candidate), batch)
        comparison = 2.0 * st.delta * (st.error - error_new) / (mu * mu)
        if comparison >= 0:
            net.set_parameters(candidate)
            res = self._gradient(net, batch)
            r_new = -res.gradient
            st.lam_bar = 0.0
            st.success = True
            st.successes += 1
            if st.successes % w.size == 0:
                st.p = r_new.copy()
            else:
                beta = (float(r_new @ r_new) - float(r_new @ st.r)) / mu
                st.p = r_new + beta * st.p
            st.r = r_new
            st.gradient = res.gradient
            st.error = res.error
            if comparison >= 0.75:
                st.lam *= 0.25
        else:
            st.lam_bar = st.lam
            st.success = False
        if comparison < 0.25:
            st.lam += st.delta * (1.0 - comparison) / pp
        if not np.any(st.r):
            self.converged = True
        return error_before


def scg_train(net, batch, config=None, epochs=100, chunk_size=DEFAULT_CHUNK_SIZE, workers=1):
    """Run ``epochs`` SCG iterations; returns the net and the error history.

    The history starts with the initial error and has one entry per epoch
    after it; it stops early once the gradient vanishes.
    """
    if epochs < 1:
        raise ConfigurationError("epochs must be at least 1")
    trainer = ScaledConjugateGradient(config, chunk_size, workers)
    history = []
    for _ in range(epochs):
        history.append(trainer.iteration(net, batch))
        if trainer.converged:
            break
    history.append(trainer.state.error)
    return net, history


@dataclass
class StopCondition:
    max_epochs: int = 500
    target_error: float = 0.0
    patience: int | None = 50
    min_improvement: float = 1e-8


@dataclass
class TrainingHistory:
    errors: list = field(default_factory=list)
    reason: str = ""

    @property
    def epochs(self):
        return len(self.errors) - 1


def train_until(trainer, net, batch, stop=None, error_fn=None):
    """Epoch loop shared by every iterative trainer.

    ``errors[0]`` is the error before training; each epoch appends the error
    after its update. Stops when the error reaches ``target_error``, after
    ``patience`` epochs without an improvement of at least
    ``min_improvement`` over the best so far, or after ``max_epochs``.
    """
    stop = stop or StopCondition()
    if stop.max_epochs < 1:
        raise ConfigurationError("max_epochs must be at least 1")
    batch = as_pairset(batch)
    error_fn = error_fn or mse
    error = error_fn(net, batch)
    history = TrainingHistory([error])
    best = error
    stale = 0
    for _ in range(stop.max_epochs):
        if error <= stop.target_error:
            history.reason = "target"
            return net, history
        trainer.iteration(net, batch)
        error = error_fn(net, batch)
        history.errors.append(error)
        if best - error >= stop.min_improvement:
            best = error
            stale = 0
        else:
            stale += 1
            if stop.patience is not None and stale >= stop.patience:
                history.reason = "patience"
                return net, history
    history.reason = "target" if error <= stop.target_error else "max_epochs"
    return net, history


TRAINERS = {
    "backprop": Backpropagation,
    "rprop": ResilientPropagation,
    "quickprop": QuickPropagation,
    "scg": ScaledConjugateGradient,
}
