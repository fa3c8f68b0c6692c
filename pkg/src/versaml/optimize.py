"""Derivative-free minimizers: PSO, simulated annealing, Nelder-Mead and a real-vector GA.

All of them minimize an :class:`Objective` and take their randomness from an
injected :class:`~versaml.rng.DeterministicRng`. Objective evaluations for a
swarm or population may be spread over threads; every random draw and every
selection step happens afterwards, in fixed index order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset.pairs import as_pairset
from .errors import ConfigurationError
from .parallel import ordered_map
from .training.gradient import mse


class Objective:
    """A pure function of a real vector to be minimized."""

    def __init__(self, fn, dimension):
        self.fn = fn
        self.dimension = int(dimension)

    def evaluate(self, x):
        return float(self.fn(np.asarray(x, dtype=float)))

    def __call__(self, x):
        return self.evaluate(x)


def as_objective(objective, dimension=None):
    if isinstance(objective, Objective):
        return objective
    if dimension is None:
        raise ConfigurationError("a plain callable objective needs its dimension")
    return Objective(objective, dimension)


@dataclass
class OptimizeResult:
    x: np.ndarray
    score: float
    history: list = field(default_factory=list)
    evaluations: int = 0
    iterations: int = 0

    def __iter__(self):
        # allows ``best, score = minimize_...(...)``
        yield self.x
        yield self.score


def _bounds(lo, hi, dim):
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,)).copy()
    if np.any(lo >= hi):
        raise ConfigurationError("every lower bound must be below its upper bound")
    return lo, hi


@dataclass
class PsoConfig:
    particles: int = 30
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    lo: float = -10.0
    hi: float = 10.0
    # maximum speed as a fraction of each dimension's range
    velocity_fraction: float = 0.1

    def __post_init__(self):
        if self.particles < 2:
            raise ConfigurationError("PSO needs at least two particles")


def pso_velocity(v, x, pbest, gbest, r1, r2, config, vmax):
    v = (config.inertia * v + config.cognitive * r1 * (pbest - x)
         + config.social * r2 * (gbest - x))
    return np.clip(v, -vmax, vmax)


def minimize_pso(objective, config=None, rng=None, iterations=100, workers=1):
    """Particle swarm with synchronous global-best updates.

    ``history[i]`` is the global best score after iteration ``i``
    (``history[0]`` is the initial swarm).
    """
    if iterations < 1:
        raise ConfigurationError("iterations must be at least 1")
    cfg = config or PsoConfig()
    obj = as_objective(objective)
    dim = obj.dimension
    lo, hi = _bounds(cfg.lo, cfg.hi, dim)
    vmax = cfg.velocity_fraction * (hi - lo)
    n = cfg.particles
    x = np.array([lo + (hi - lo) * rng.uniform_array(dim) for _ in range(n)])
    v = np.array([vmax * rng.uniform_array(dim, -1.0, 1.0) for _ in range(n)])
    scores = np.array(ordered_map(obj.evaluate, list(x), workers))
    pbest = x.copy()
    pbest_score = scores.copy()
    g = int(np.argmin(pbest_score))
    gbest, gbest_score = pbest[g].copy(), float(pbest_score[g])
    history = [gbest_score]
    evaluations = n
    for _ in range(iterations):
        for i in range(n):
            r1 = rng.uniform_array(dim)
            r2 = rng.uniform_array(dim)
            v[i] = pso_velocity(v[i], x[i], pbest[i], gbest, r1, r2, cfg, vmax)
            x[i] = np.clip(x[i] + v[i], lo, hi)
        scores = ordered_map(obj.evaluate, list(x), workers)
        evaluations += n
        for i, s in enumerate(scores):
            if s < pbest_score[i]:
                pbest_score[i] = s
                pbest[i] = x[i]
                if s < gbest_score:
                    gbest_score = float(s)
                    gbest = x[i].copy()
        history.append(gbest_score)
    return OptimizeResult(gbest, gbest_score, history, evaluations, iterations)


@dataclass
class AnnealConfig:
    start_temp: float = 10.0
    end_temp: float = 0.01
    cycles: int = 10
    steps: int = 100
    # each temperature level starts its walk from the best point found so far
    restart_from_best: bool = True

    def __post_init__(self):
        if not self.start_temp > self.end_temp > 0:
            raise ConfigurationError("annealing needs start_temp > end_temp > 0")
        if self.cycles < 1 or self.steps < 1:
            raise ConfigurationError("annealing needs at least one step and one cycle")

    def temperature(self, step):
        if self.steps == 1:
            return self.start_temp
        return self.start_temp * (self.end_temp / self.start_temp) ** (step / (self.steps - 1))


def metropolis_accept(delta, temperature, u):
    """Accept improvements always, worse moves with probability exp(-delta/T)."""
    if delta < 0:
        return True
    if temperature <= 0:
        return False
    return u < math.exp(-delta / temperature)


def minimize_anneal(objective, initial, config=None, rng=None):
    """Simulated annealing with a geometric schedule.

    Candidates perturb every coordinate by N(0, T / start_temp). The best
    point ever evaluated is returned, independent of the current state. With
    ``restart_from_best`` the walk re-enters each new temperature level at
    that best point.
    """
    cfg = config or AnnealConfig()
    x = np.asarray(initial, dtype=float).copy()
    obj = as_objective(objective, x.size)
    current = obj.evaluate(x)
    best, best_score = x.copy(), current
    history = [best_score]
    evaluations = 1
    for step in range(cfg.steps):
        t = cfg.temperature(step)
        scale = t / cfg.start_temp
        if cfg.restart_from_best:
            x, current = best.copy(), best_score
        for _ in range(cfg.cycles):
            candidate = x + rng.gaussian_array(x.size, scale)
            score = obj.evaluate(candidate)
            evaluations += 1
            delta = score - current
            u = rng.next_double() if delta >= 0 else 0.0
            if metropolis_accept(delta, t, u):
                x, current = candidate, score
                if score < best_score:
                    best, best_score = candidate.copy(), score
        history.append(best_score)
    return OptimizeResult(best, best_score, history, evaluations, cfg.steps)


@dataclass
class NelderMeadConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    epsilon: float = 1e-10
    step: float = 0.1

    def __post_init__(self):
        if not (self.reflection > 0 and self.expansion > 1 and 0 < self.contraction < 1
                and 0 < self.shrink < 1):
            raise ConfigurationError("invalid Nelder-Mead coefficients")


def minimize_nelder_mead(objective, initial, config=None, max_iter=1000):
    """Downhill simplex from ``initial`` plus one ``step`` along each axis.

    Stops when the spread of scores over the simplex falls below
    ``epsilon`` or after ``max_iter`` iterations.
    """
    cfg = config or NelderMeadConfig()
    x0 = np.asarray(initial, dtype=float).ravel()
    dim = x0.size
    if dim < 1:
        raise ConfigurationError("Nelder-Mead needs at least one dimension")
    obj = as_objective(objective, dim)
    simplex = np.vstack([x0] + [x0 + cfg.step * e for e in np.eye(dim)])
    scores = np.array([obj.evaluate(p) for p in simplex])
    evaluations = dim + 1
    history = [float(scores.min())]
    it = 0
    while it < max_iter:
        order = np.argsort(scores, kind="stable")
        simplex, scores = simplex[order], scores[order]
        if scores[-1] - scores[0] < cfg.epsilon:
            break
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + cfg.reflection * (centroid - worst)
        fr = obj.evaluate(xr)
        evaluations += 1
        shrink = False
        if scores[0] <= fr < scores[-2]:
            simplex[-1], scores[-1] = xr, fr
        elif fr < scores[0]:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = obj.evaluate(xe)
            evaluations += 1
            if fe < fr:
                simplex[-1], scores[-1] = xe, fe
            else:
                simplex[-1], scores[-1] = xr, fr
        elif fr < scores[-1]:
            xc = centroid + cfg.contraction * (xr - centroid)
            fc = obj.evaluate(xc)
            evaluations += 1
            if fc <= fr:
                simplex[-1], scores[-1] = xc, fc
            else:
                shrink = True
        else:
            xc = centroid + cfg.contraction * (worst - centroid)
            fc = obj.evaluate(xc)
            evaluations += 1
            if fc < scores[-1]:
                simplex[-1], scores[-1] = xc, fc
            else:
                shrink = True
        if shrink:
            for i in range(1, dim + 1):
                simplex[i] = simplex[0] + cfg.shrink * (simplex[i] - simplex[0])
                scores[i] = obj.evaluate(simplex[i])
            evaluations += dim
        history.append(float(scores.min()))
    b = int(np.argmin(scores))
    return OptimizeResult(simplex[b].copy(), float(scores[b]), history, evaluations, it)


@dataclass
class GaVectorConfig:
    population: int = 50
    tournament: int = 4
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_sigma: float = 0.1
    elitism: int = 1
    lo: float = -10.0
    hi: float = 10.0

    def __post_init__(self):
        if self.population < 2:
            raise ConfigurationError("GA population must be at least 2")
        if not 0 <= self.elitism < self.population:
            raise ConfigurationError("elitism must be smaller than the population")
        if self.tournament < 1:
            raise ConfigurationError("tournament size must be positive")


def tournament_select(scores, size, rng):
    """Best of ``size`` uniform draws (with replacement); ties keep the first drawn."""
    best = rng.next_range(0, len(scores) - 1)
    for _ in range(size - 1):
        c = rng.next_range(0, len(scores) - 1)
        if scores[c] < scores[best]:
            best = c
    return best


def minimize_ga(objective, config=None, rng=None, generations=100, workers=1):
    """Generational GA on real vectors.

    Tournament selection, uniform crossover, per-gene Gaussian mutation and
    elitism (the best individuals are copied unchanged).
    """
    if generations < 1:
        raise ConfigurationError("generations must be at least 1")
    cfg = config or GaVectorConfig()
    obj = as_objective(objective)
    dim = obj.dimension
    lo, hi = _bounds(cfg.lo, cfg.hi, dim)
    pop = np.array([lo + (hi - lo) * rng.uniform_array(dim) for _ in range(cfg.population)])
    scores = np.array(ordered_map(obj.evaluate, list(pop), workers))
    evaluations = len(pop)
    history = [float(scores.min())]
    for _ in range(generations):
        order = np.argsort(scores, kind="stable")
        children = [pop[i].copy() for i in order[:cfg.elitism]]
        child_scores = [scores[i] for i in order[:cfg.elitism]]
        offspring = []
        while len(children) + len(offspring) < cfg.population:
            a = pop[tournament_select(scores, cfg.tournament, rng)]
            if rng.next_double() < cfg.crossover_rate:
                b = pop[tournament_select(scores, cfg.tournament, rng)]
                mask = np.array([rng.next_bool() for _ in range(dim)])
                child = np.where(mask, a, b)
            else:
                child = a.copy()
            for j in range(dim):
                if rng.next_double() < cfg.mutation_rate:
                    child[j] += cfg.mutation_sigma * rng.next_gaussian()
            offspring.append(child)
        child_scores.extend(ordered_map(obj.evaluate, offspring, workers))
        evaluations += len(offspring)
        pop = np.array(children + offspring)
        scores = np.array(child_scores)
        history.append(float(scores.min()))
    b = int(np.argmin(scores))
    return OptimizeResult(pop[b].copy(), float(scores[b]), history, evaluations, generations)


def model_loss_objective(model, pairs):
    """Objective whose value at ``v`` is the MSE of ``model`` with parameters ``v``.

    The caller's model is never modified; each evaluation works on a copy.
    """
    pairs = as_pairset(pairs)
    if len(pairs) == 0:
        raise ConfigurationError("the loss objective needs at least one pair")
    dim = model.parameter_count
    if dim < 1:
        raise ConfigurationError(f"{type(model).__name__} has no parameters to optimize")
    template = model.copy()
    return Objective(lambda v: mse(template.with_parameters(v), pairs), dim)


OPTIMIZERS = ("pso", "anneal", "nelder_mead", "ga")
