import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from versaml.dataset import PairSet
from versaml.errors import ConfigurationError, ModelLoadError
from versaml.gp import (DEFAULT_FUNCTIONS, ConstantPolicy, FunctionSet, GpConfig, GpModel,
                        PenaltyRule, const, count_matches, crossover_subtree, depth, eval_batch,
                        eval_tree, evolve, fitness, func, generate_tree, init_population, mutate,
                        node_count, parse_sexpr, simplify, to_sexpr, var)
from versaml.gp.tree import VALUE_LIMIT
from versaml.rng import DeterministicRng

X = var(0)


def random_tree(seed, max_depth=6, nvars=2, constants=None):
    rng = DeterministicRng(seed)
    method = "full" if rng.next_bool() else "grow"
    d = rng.next_range(0, max_depth)
    return generate_tree(method, d, nvars, DEFAULT_FUNCTIONS,
                         constants or ConstantPolicy.generated(-3, 3), rng)


def quadratic_pairs():
    x = np.linspace(-1, 1, 20).reshape(-1, 1)
    return PairSet(x, x * x + x)


# evaluation -------------------------------------------------------------------------

def test_eval_examples():
    assert eval_tree(func("+", X, const(1)), [2.0]) == 3.0
    assert eval_tree(func("/", const(1), const(0)), []) == 1.0
    assert abs(eval_tree(func("sin", func("*", const(2), X)), [math.pi / 4]) - 1) < 1e-12
    assert eval_tree(func("exp", const(1000)), []) == math.exp(80)
    assert eval_tree(func("pow", const(-2), const(0.5)), []) == 1.0
    assert eval_tree(func("pow", const(-2), const(3)), []) == -8.0


def test_eval_fuzz_always_finite():
    points = DeterministicRng(0).uniform_array(20, -10, 10).reshape(10, 2)
    for seed in range(10_000):
        out = eval_batch(random_tree(seed), points)
        assert np.all(np.isfinite(out)) and np.all(np.abs(out) <= VALUE_LIMIT)


def test_function_set_extension():
    fs = FunctionSet().add("sq", 1, np.square)
    assert eval_tree(parse_sexpr("(sq x0)", fs), [3.0], fs) == 9.0
    with pytest.raises(ConfigurationError):
        fs.add("sq", 1, np.square)
    assert fs.names[:8] == ["+", "-", "*", "/", "sin", "cos", "exp", "pow"]


# s-expressions ----------------------------------------------------------------------

def test_sexpr_format():
    tree = func("+", func("*", const(2), X), const(1))
    assert to_sexpr(tree) == "(+ (* 2.0 x0) 1.0)"
    assert parse_sexpr("(+ (* 2.0 x0) 1.0)") == tree


@given(st.integers(0, 100_000))
def test_sexpr_round_trip(seed):
    tree = random_tree(seed)
    assert parse_sexpr(to_sexpr(tree)) == tree


@pytest.mark.parametrize("text", ["", "(+ x0)", "(foo x0 x1)", "(+ x0 x1", "x0 x1", ")",
                                  "(+ x0 abc)", "(+ x0 inf)"])
def test_sexpr_errors(text):
    with pytest.raises(ModelLoadError):
        parse_sexpr(text)


# population & operators ---------------------------------------------------------------

def test_init_population():
    cfg = GpConfig(population=50)
    a = init_population(cfg, 2, DEFAULT_FUNCTIONS, ConstantPolicy(), DeterministicRng(4))
    b = init_population(cfg, 2, DEFAULT_FUNCTIONS, ConstantPolicy(), DeterministicRng(4))
    assert len(a) == 50
    assert max(depth(t) for t in a) <= 6
    assert [to_sexpr(t) for t in a] == [to_sexpr(t) for t in b]
    # full-method trees reach their target depth exactly
    assert [depth(t) for t in a[:5]] == [2, 3, 4, 5, 6]


def test_crossover_single_constants_swap():
    a, b = const(1.5), const(-2.0)
    assert crossover_subtree(a, b, DeterministicRng(0)) == (b, a)


def test_crossover_depth_rejection():
    deep = random_tree(1)
    while depth(deep) < 4:
        deep = func("sin", deep)
    rng = DeterministicRng(3)
    for _ in range(50):
        ca, cb = crossover_subtree(deep, deep, rng, max_depth=depth(deep))
        assert depth(ca) <= depth(deep) and depth(cb) <= depth(deep)
    ca, cb = crossover_subtree(deep, X, DeterministicRng(5), max_depth=0)
    assert ca == deep


@settings(max_examples=60)
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 10_000))
def test_crossover_conserves_nodes(sa, sb, seed):
    a, b = random_tree(sa), random_tree(sb)
    ca, cb = crossover_subtree(a, b, DeterministicRng(seed), max_depth=100)
    assert node_count(a) + node_count(b) == node_count(ca) + node_count(cb)


def test_mutation_pool_constant():
    pool = ConstantPolicy.from_pool([0.5, 2.0, 7.0])
    cfg = GpConfig()
    for seed in range(200):
        out = mutate(const(0.5), cfg, 0, DEFAULT_FUNCTIONS, pool, DeterministicRng(seed))
        leaves = [n for n in _nodes(out) if n.kind == "constant"]
        assert all(n.value in (0.5, 2.0, 7.0) for n in leaves)


def _nodes(tree):
    yield tree
    for c in tree.children:
        yield from _nodes(c)


@settings(max_examples=60)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_mutation_depth_cap_and_determinism(tree_seed, seed):
    cfg = GpConfig(max_depth=6, init_depth=(2, 6))
    tree = random_tree(tree_seed)
    a = mutate(tree, cfg, 2, DEFAULT_FUNCTIONS, ConstantPolicy(), DeterministicRng(seed))
    b = mutate(tree, cfg, 2, DEFAULT_FUNCTIONS, ConstantPolicy(), DeterministicRng(seed))
    assert depth(a) <= 6 and a == b


def test_constant_policy_checks():
    with pytest.raises(ConfigurationError):
        ConstantPolicy.from_pool([])
    with pytest.raises(ConfigurationError):
        ConstantPolicy.generated(1, 1)


# simplification ----------------------------------------------------------------------

def test_simplify_rules():
    assert simplify(func("+", X, const(0))) == X
    assert simplify(func("*", func("+", const(1), const(2)), X)) == func("*", const(3), X)
    assert simplify(func("-", X, X)) == const(0)
    assert simplify(func("*", const(0), func("exp", X))) == const(0)
    assert simplify(func("/", X, const(1))) == X
    assert simplify(func("*", const(1), func("-", X, const(0)))) == X


@settings(max_examples=300)
@given(st.integers(0, 1_000_000))
def test_simplify_preserves_semantics(seed):
    tree = random_tree(seed, constants=ConstantPolicy.from_pool([0.0, 1.0, 2.0, -1.0]))
    points = DeterministicRng(seed).uniform_array(200, -2, 2).reshape(100, 2)
    simple = simplify(tree)
    before, after = eval_batch(tree, points), eval_batch(simple, points)
    assert np.all(np.abs(before - after) <= 1e-9 * np.maximum(1.0, np.abs(before)))
    assert node_count(simple) <= node_count(tree)


# fitness -------------------------------------------------------------------------------

def test_fitness_cases():
    pairs = quadratic_pairs()
    exact = func("+", func("*", X, X), X)
    assert fitness(exact, pairs, GpConfig(parsimony=0.0)) == 0.0
    bigger = func("+", func("*", X, X), func("+", X, const(0.0)))
    cfg = GpConfig(parsimony=0.001)
    assert fitness(exact, pairs, cfg) < fitness(bigger, pairs, cfg)
    rule = PenaltyRule.parse("(/ ? ?)", 10.0)
    with_div = func("+", func("/", X, const(2)), func("/", const(1), X))
    assert count_matches(rule.pattern, with_div) == 2
    base = fitness(with_div, pairs, GpConfig(parsimony=0.0))
    assert fitness(with_div, pairs, GpConfig(parsimony=0.0, penalties=[rule])) == base + 20.0


def test_config_checks():
    with pytest.raises(ConfigurationError):
        GpConfig(max_depth=4, init_depth=(2, 6))
    with pytest.raises(ConfigurationError):
        GpConfig(crossover_rate=1.5)


# evolution -------------------------------------------------------------------------------

def test_evolve_quadratic_seed13():
    res = evolve(quadratic_pairs(), GpConfig(target_mse=1e-5), rng=DeterministicRng(13),
                 generations=200)
    assert res.best_mse < 1e-4 and res.generations <= 200


def test_evolve_invariants():
    cfg = GpConfig(population=40, max_depth=7, init_depth=(2, 5))
    res = evolve(quadratic_pairs(), cfg, rng=DeterministicRng(2), generations=8)
    assert len(res.history) == 9
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert len(res.population) == 40
    assert max(depth(t) for t in res.population) <= 7
    again = evolve(quadratic_pairs(), cfg, rng=DeterministicRng(2), generations=8, workers=3)
    assert to_sexpr(again.best) == to_sexpr(res.best) and again.history == res.history


def test_gp_model_contract():
    model = GpModel(func("+", func("*", X, X), X), 1)
    assert model.compute([2.0]).tolist() == [6.0]
    again = GpModel.from_dict(model.to_dict(), [])
    assert again.tree == model.tree
    with pytest.raises(ConfigurationError):
        GpModel(var(3), 2)
