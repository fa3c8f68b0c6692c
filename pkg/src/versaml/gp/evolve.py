"""Generational evolution of expression trees and the GP regression model."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..models.base import RegressionModel
from ..optimize import tournament_select
from ..parallel import ordered_map
from .operators import (ConstantPolicy, crossover_subtree, fitness, init_population, mutate,
                        raw_mse, simplify, split_pairs)
from .tree import DEFAULT_FUNCTIONS, depth, eval_batch, max_variable, parse_sexpr, to_sexpr


@dataclass
class GpConfig:
    population: int = 256
    tournament: int = 4
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    max_depth: int = 10
    init_depth: tuple = (2, 6)
    mutation_depth: int = 3
    parsimony: float = 0.001
    elitism: int = 1
    penalties: list = field(default_factory=list)
    simplify: bool = True
    # stop as soon as the best tree's raw MSE is at or below this
    target_mse: float | None = None

    def __post_init__(self):
        lo, hi = self.init_depth
        if not 0 <= lo <= hi:
            raise ConfigurationError("init_depth must be an increasing (lo, hi) pair")
        if self.max_depth < hi:
            raise ConfigurationError("max_depth must be at least the initial depth cap")
        for rate in (self.crossover_rate, self.mutation_rate):
            if not 0 <= rate <= 1:
                raise ConfigurationError("rates must lie in [0, 1]")
        if self.population < 2 or not 0 <= self.elitism < self.population:
            raise ConfigurationError("need population >= 2 and elitism < population")


@dataclass
class EvolutionResult:
    best: object
    best_fitness: float
    best_mse: float
    history: list
    generations: int
    population: list = field(repr=False, default_factory=list)


def evolve(pairs, config=None, functions=DEFAULT_FUNCTIONS, constants=None, rng=None,
           generations=100, workers=1):
    """Symbolic regression by tree-based GP.

    Each generation keeps the ``elitism`` best trees unchanged, then fills
    the population from tournament winners: crossover with probability
    ``crossover_rate``, otherwise a copy, each child mutated with
    probability ``mutation_rate`` and optionally simplified.
    ``history[g]`` is the best fitness of generation ``g`` (0 = initial).
    """
    if generations < 1:
        raise ConfigurationError("generations must be at least 1")
    cfg = config or GpConfig()
    constants = constants or ConstantPolicy()
    inputs, targets = split_pairs(pairs)
    data = (inputs, targets)
    nvars = inputs.shape[1]

    def score(tree):
        return fitness(tree, data, cfg, functions)

    pop = init_population(cfg, nvars, functions, constants, rng)
    if cfg.simplify:
        pop = [simplify(t, functions) for t in pop]
    scores = np.array(ordered_map(score, pop, workers))
    history = [float(scores.min())]
    gen = 0
    for gen in range(1, generations + 1):
        best_i = int(np.argmin(scores))
        if cfg.target_mse is not None and raw_mse(pop[best_i], inputs, targets, functions) \
                <= cfg.target_mse:
            gen -= 1
            break
        order = np.argsort(scores, kind="stable")
        elite = [pop[i] for i in order[:cfg.elitism]]
        elite_scores = [float(scores[i]) for i in order[:cfg.elitism]]
        children = []
        room = cfg.population - len(elite)
        while len(children) < room:
            a = pop[tournament_select(scores, cfg.tournament, rng)]
            if rng.next_double() < cfg.crossover_rate:
                b = pop[tournament_select(scores, cfg.tournament, rng)]
                brood = list(crossover_subtree(a, b, rng, cfg.max_depth))
            else:
                brood = [a]
            for child in brood:
                if len(children) >= room:
                    break
                if rng.next_double() < cfg.mutation_rate:
                    child = mutate(child, cfg, nvars, functions, constants, rng)
                if cfg.simplify:
                    child = simplify(child, functions)
                children.append(child)
        pop = elite + children
        scores = np.array(elite_scores + ordered_map(score, children, workers))
        history.append(float(scores.min()))
    best_i = int(np.argmin(scores))
    best = pop[best_i]
    return EvolutionResult(best, float(scores[best_i]), raw_mse(best, inputs, targets, functions),
                           history, gen, pop)


class GpModel(RegressionModel):
    """Regression model wrapping one evolved tree (single output, no parameters)."""

    kind = "gp"
    output_count = 1

    def __init__(self, tree, input_count, functions=DEFAULT_FUNCTIONS):
        if max_variable(tree) >= input_count:
            raise ConfigurationError("tree uses more variables than the model has inputs")
        self.tree = tree
        self.input_count = int(input_count)
        self.functions = functions

    def compute_batch(self, inputs):
        inputs = self._check_batch(inputs)
        return eval_batch(self.tree, inputs, self.functions)[:, None]

    def summary(self):
        return f"GpModel({to_sexpr(self.tree)}, depth {depth(self.tree)})"

    def to_dict(self):
        return {"tree": to_sexpr(self.tree), "input_count": self.input_count}

    @classmethod
    def from_dict(cls, arch, params):
        return cls(parse_sexpr(arch["tree"]), arch["input_count"])
