"""Linear regression and generalized linear models (identity / logit link)."""

import enum

import numpy as np

from ..dataset.pairs import as_pairset
from ..errors import ConfigurationError
from .base import RegressionModel, check_parameter_vector

RIDGE_LAMBDA = 1e-8


class Link(str, enum.Enum):
    identity = "identity"
    logit = "logit"


def _logistic(eta):
    return 0.5 * (1.0 + np.tanh(0.5 * eta))


class GlmModel(RegressionModel):
    """``coefficients`` holds one weight per input followed by the intercept."""

    kind = "glm"
    output_count = 1

    def __init__(self, coefficients, link=Link.identity):
        self.coefficients = np.array(coefficients, dtype=float).ravel()
        if self.coefficients.size < 1:
            raise ConfigurationError("a GLM needs at least an intercept")
        self.link = Link(link)
        self.input_count = self.coefficients.size - 1
        self.converged = True
        self.iterations = 0

    @property
    def intercept(self):
        return float(self.coefficients[-1])

    @property
    def weights(self):
        return self.coefficients[:-1]

    def linear_predictor(self, inputs):
        return (inputs * self.coefficients[None, :-1]).sum(axis=1) + self.coefficients[-1]

    def compute_batch(self, inputs):
        inputs = self._check_batch(inputs)
        eta = self.linear_predictor(inputs)
        if self.link is Link.logit:
            return _logistic(eta)[:, None]
        return eta[:, None]

    def get_parameters(self):
        return self.coefficients.copy()

    def set_parameters(self, params):
        self.coefficients = check_parameter_vector(params, self.coefficients.size).copy()

    def summary(self):
        return f"{type(self).__name__}(link={self.link.value}, coefficients={self.coefficients.tolist()})"

    def to_dict(self):
        return {"link": self.link.value, "input_count": self.input_count}

    @classmethod
    def from_dict(cls, arch, params):
        return cls(params, arch["link"])


class LinearRegression(GlmModel):
    """Identity-link GLM fitted in closed form."""

    kind = "linear"

    def __init__(self, coefficients):
        super().__init__(coefficients, Link.identity)

    @classmethod
    def from_dict(cls, arch, params):
        return cls(params)


def glm_predict(model, x):
    return float(model.compute(x)[0])


def _design(inputs):
    return np.hstack([inputs, np.ones((inputs.shape[0], 1))])


def _solve_normal(gram, rhs):
    """Solve the normal equations, adding a 1e-8 ridge when ``gram`` is singular."""
    p = gram.shape[0]
    singular = np.linalg.matrix_rank(gram) < p or np.linalg.cond(gram) > 1e12
    if not singular:
        try:
            return np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            pass
    return np.linalg.solve(gram + RIDGE_LAMBDA * np.eye(p), rhs)


def _single_output(pairs):
    pairs = as_pairset(pairs)
    if len(pairs) == 0:
        raise ConfigurationError("cannot fit a linear model to zero rows")
    if pairs.ideal_count != 1:
        raise ConfigurationError("linear models fit a single output")
    return pairs.inputs, pairs.ideals[:, 0]


def linreg_fit(pairs):
    """Ordinary least squares via the normal equations."""
    x, y = _single_output(pairs)
    a = _design(x)
    coef = _solve_normal(a.T @ a, a.T @ y)
    return LinearRegression(coef)


def glm_fit_irls(pairs, link=Link.identity, max_iter=25, tol=1e-8):
    """Iteratively reweighted least squares.

    Stops when the largest coefficient change drops below ``tol``; if
    ``max_iter`` is reached first (e.g. perfectly separable logit data) the
    model is returned with ``converged = False``.
    """
    link = Link(link)
    x, y = _single_output(pairs)
    if link is Link.logit and not np.all((y == 0) | (y == 1)):
        raise ConfigurationError("logit link needs 0/1 targets")
    a = _design(x)
    beta = np.zeros(a.shape[1])
    model = GlmModel(beta, link)
    model.converged = False
    for it in range(1, max_iter + 1):
        eta = a @ beta
        if link is Link.identity:
            w = np.ones_like(y)
            z = y
        else:
            mu = np.clip(_logistic(eta), 1e-10, 1.0 - 1e-10)
            w = mu * (1.0 - mu)
            z = eta + (y - mu) / w
        aw = a * w[:, None]
        new_beta = _solve_normal(a.T @ aw, aw.T @ z)
        change = float(np.max(np.abs(new_beta - beta)))
        beta = new_beta
        model.iterations = it
        # with unit weights the first solve is already the exact OLS answer
        if change < tol or link is Link.identity:
            model.converged = True
            break
    model.coefficients = beta
    return model
