"""Tree generation, variation, simplification and penalised fitness."""

from dataclasses import dataclass

import numpy as np

from ..dataset.pairs import as_pairset
from ..errors import ConfigurationError
from .tree import (DEFAULT_FUNCTIONS, GpNode, const, depth, eval_batch, func,
                   node_count, nodes_with_paths, parse_sexpr, replace_at, subtree_at, var)


@dataclass(frozen=True)
class ConstantPolicy:
    """Where constant leaves come from: a fixed pool, or uniform in [lo, hi)."""

    mode: str = "generated"
    pool: tuple = ()
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if self.mode == "pool" and not self.pool:
            raise ConfigurationError("constant pool must not be empty")
        if self.mode == "generated" and not self.lo < self.hi:
            raise ConfigurationError("generated constants need lo < hi")
        if self.mode not in ("pool", "generated"):
            raise ConfigurationError(f"unknown constant mode {self.mode!r}")

    @classmethod
    def from_pool(cls, values):
        return cls("pool", tuple(float(v) for v in values))

    @classmethod
    def generated(cls, lo=-1.0, hi=1.0):
        return cls("generated", (), float(lo), float(hi))

    def draw(self, rng):
        if self.mode == "pool":
            return self.pool[rng.next_range(0, len(self.pool) - 1)]
        return rng.next_uniform(self.lo, self.hi)


def random_terminal(variable_count, constants, rng):
    if variable_count > 0 and (rng.next_bool() or constants is None):
        return var(rng.next_range(0, variable_count - 1))
    return const(constants.draw(rng))


def random_function(functions, rng):
    fs = list(functions)
    return fs[rng.next_range(0, len(fs) - 1)]


def generate_tree(method, max_depth, variable_count, functions, constants, rng, _level=0):
    """Build a tree with the ``full`` or ``grow`` method.

    ``full`` places functions everywhere above ``max_depth``; ``grow``
    picks functions or terminals freely below the root (in proportion to
    their numbers), so its trees can be shallower.
    """
    if _level >= max_depth:
        return random_terminal(variable_count, constants, rng)
    use_function = True
    if method == "grow" and _level > 0:
        n_terminals = max(variable_count, 0) + 1
        use_function = rng.next_range(0, len(functions) + n_terminals - 1) < len(functions)
    if not use_function:
        return random_terminal(variable_count, constants, rng)
    f = random_function(functions, rng)
    children = [generate_tree(method, max_depth, variable_count, functions, constants, rng,
                              _level + 1) for _ in range(f.arity)]
    return func(f.name, *children)


def init_population(config, variable_count, functions=DEFAULT_FUNCTIONS, constants=None, rng=None):
    """Ramped half-and-half: depths cycle through the configured range, and
    each depth alternates between the full and grow methods.
    """
    constants = constants or ConstantPolicy()
    lo, hi = config.init_depth
    depths = list(range(lo, hi + 1))
    trees = []
    for i in range(config.population):
        d = depths[i % len(depths)]
        method = "full" if (i // len(depths)) % 2 == 0 else "grow"
        trees.append(generate_tree(method, d, variable_count, functions, constants, rng))
    return trees


def _pick_node(tree, rng, function_bias=0.9):
    nodes = nodes_with_paths(tree)
    funcs = [p for p, n in nodes if n.is_function]
    terms = [p for p, n in nodes if n.is_terminal]
    if funcs and (not terms or rng.next_double() < function_bias):
        return funcs[rng.next_range(0, len(funcs) - 1)]
    return terms[rng.next_range(0, len(terms) - 1)]


def crossover_subtree(parent_a, parent_b, rng, max_depth=10, function_bias=0.9):
    """Swap randomly chosen subtrees (function nodes preferred 90% of the time).

    A child deeper than ``max_depth`` is replaced by a copy of its own parent.
    """
    pa = _pick_node(parent_a, rng, function_bias)
    pb = _pick_node(parent_b, rng, function_bias)
    sub_a = subtree_at(parent_a, pa)
    sub_b = subtree_at(parent_b, pb)
    child_a = replace_at(parent_a, pa, sub_b)
    child_b = replace_at(parent_b, pb, sub_a)
    if depth(child_a) > max_depth:
        child_a = parent_a
    if depth(child_b) > max_depth:
        child_b = parent_b
    return child_a, child_b


def mutate(tree, config, variable_count, functions=DEFAULT_FUNCTIONS, constants=None, rng=None):
    """Point mutation or subtree mutation, chosen with equal probability."""
    constants = constants or ConstantPolicy()
    nodes = nodes_with_paths(tree)
    path, node = nodes[rng.next_range(0, len(nodes) - 1)]
    if rng.next_bool():
        if node.is_function:
            candidates = functions.with_arity(len(node.children))
            f = candidates[rng.next_range(0, len(candidates) - 1)]
            replacement = func(f.name, *node.children)
        else:
            replacement = random_terminal(variable_count, constants, rng)
    else:
        replacement = generate_tree("grow", config.mutation_depth, variable_count, functions,
                                    constants, rng)
    mutant = replace_at(tree, path, replacement)
    if depth(mutant) > config.max_depth:
        return tree
    return mutant


def _is_const(node, value=None):
    return node.kind == "constant" and (value is None or node.value == value)


def _simplify_node(node, functions):
    if node.is_terminal:
        return node
    children = tuple(_simplify_node(c, functions) for c in node.children)
    node = GpNode(node.kind, node.name, node.index, node.value, children)
    if all(_is_const(c) for c in children):
        folded = eval_batch(node, np.zeros((1, 0)), functions)[0]
        return const(folded)
    name = node.name
    if len(children) == 2:
        a, b = children
        if name == "+":
            if _is_const(b, 0.0):
                return a
            if _is_const(a, 0.0):
                return b
        elif name == "*":
            if _is_const(b, 1.0):
                return a
            if _is_const(a, 1.0):
                return b
            if _is_const(a, 0.0) or _is_const(b, 0.0):
                return const(0.0)
        elif name == "-":
            if _is_const(b, 0.0):
                return a
            if a == b:
                return const(0.0)
        elif name == "/":
            if _is_const(b, 1.0):
                return a
    return node


def simplify(tree, functions=DEFAULT_FUNCTIONS):
    """Bottom-up rewriting to a fixpoint.

    Rules: fold constant subexpressions; ``x+0``, ``0+x``, ``x*1``, ``1*x``,
    ``x-0`` and ``x/1`` become ``x``; ``x*0``, ``0*x`` and ``x-x`` become 0.
    Evaluation is clamped finite, so every rule keeps the value unchanged.
    """
    while True:
        out = _simplify_node(tree, functions)
        if out == tree:
            return out
        tree = out


@dataclass(frozen=True)
class PenaltyRule:
    """Additive cost for every subtree matching ``pattern`` (``?`` matches anything)."""

    pattern: GpNode
    cost: float

    @classmethod
    def parse(cls, text, cost, functions=DEFAULT_FUNCTIONS):
        return cls(parse_sexpr(text, functions, wildcard=True), float(cost))


def matches(pattern, node):
    if pattern.kind == "wildcard":
        return True
    if pattern.kind != node.kind:
        return False
    if node.kind == "variable":
        return pattern.index == node.index
    if node.kind == "constant":
        return pattern.value == node.value
    return (pattern.name == node.name and len(pattern.children) == len(node.children)
            and all(matches(p, c) for p, c in zip(pattern.children, node.children)))


def count_matches(pattern, tree):
    return sum(1 for _, n in nodes_with_paths(tree) if matches(pattern, n))


def split_pairs(pairs):
    if isinstance(pairs, tuple):
        inputs, targets = pairs
        return np.asarray(inputs, dtype=float), np.asarray(targets, dtype=float).ravel()
    pairs = as_pairset(pairs)
    if pairs.ideal_count != 1:
        raise ConfigurationError("genetic programming fits a single output")
    return pairs.inputs, pairs.ideals[:, 0]


def raw_mse(tree, inputs, targets, functions=DEFAULT_FUNCTIONS):
    pred = eval_batch(tree, inputs, functions)
    with np.errstate(over="ignore"):
        diff = pred - targets
        return float((diff * diff).mean())


def fitness(tree, pairs, config, functions=DEFAULT_FUNCTIONS):
    """MSE + parsimony * nodes + penalty costs; lower is better.

    ``pairs`` is a single-output :class:`PairSet` or an ``(inputs, targets)``
    tuple of arrays.
    """
    inputs, targets = split_pairs(pairs)
    if len(targets) == 0:
        raise ConfigurationError("fitness needs at least one pair")
    score = raw_mse(tree, inputs, targets, functions)
    score += config.parsimony * node_count(tree)
    for rule in config.penalties:
        score += rule.cost * count_matches(rule.pattern, tree)
    return score
