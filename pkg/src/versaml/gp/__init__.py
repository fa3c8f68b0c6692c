"""Tree-based genetic programming for symbolic regression."""

from .evolve import EvolutionResult, GpConfig, GpModel, evolve
from .operators import (ConstantPolicy, PenaltyRule, count_matches, crossover_subtree,
                        fitness, generate_tree, init_population, matches, mutate, raw_mse,
                        simplify)
from .tree import (DEFAULT_FUNCTIONS, FunctionSet, GpFunction, GpNode, const, depth,
                   eval_batch, eval_tree, func, node_count, parse_sexpr, to_sexpr, var)

__all__ = [
    "EvolutionResult", "GpConfig", "GpModel", "evolve", "ConstantPolicy", "PenaltyRule",
    "count_matches", "crossover_subtree", "fitness", "generate_tree", "init_population",
    "matches", "mutate", "raw_mse", "simplify", "DEFAULT_FUNCTIONS", "FunctionSet",
    "GpFunction", "GpNode", "const", "depth", "eval_batch", "eval_tree", "func",
    "node_count", "parse_sexpr", "to_sexpr", "var",
]
