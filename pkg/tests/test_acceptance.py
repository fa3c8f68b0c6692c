"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line with the measured values; the lines are
printed in the pytest terminal summary. Running this file directly prints
them too.
"""

import itertools
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import iris_dataset  # noqa: E402
from versaml.dataset import (ColumnEncoder, ColumnStats, NormalizationStrategy, PairSet,  # noqa: E402
                             denormalize_value, equilateral_decode, equilateral_matrix,
                             normalize_value)
from versaml.dataset.columns import ColumnDefinition, ColumnType  # noqa: E402
from versaml.gp import (ConstantPolicy, DEFAULT_FUNCTIONS, GpConfig, GpModel, eval_batch,  # noqa: E402
                        evolve, generate_tree, parse_sexpr, simplify)
from versaml.models import (FeedforwardNetwork, GlmModel, KMeansModel, KnnModel, Link,  # noqa: E402
                            SomModel, feedforward_init, glm_fit_irls, kmeans_fit, linreg_fit,
                            rbf_from_data)
from versaml.optimize import (AnnealConfig, GaVectorConfig, Objective, PsoConfig,  # noqa: E402
                              minimize_anneal, minimize_ga, minimize_nelder_mead, minimize_pso,
                              model_loss_objective)
from versaml.persistence import dumps_model, loads_model  # noqa: E402
from versaml.pipeline import ModelPipeline, calculate_regression_error  # noqa: E402
from versaml.rng import DeterministicRng  # noqa: E402
from versaml.training import (ResilientPropagation, StopCondition, compute_gradient, mse,  # noqa: E402
                              scg_train, train_until)

RESULTS = {}


def record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} ({detail})"
    RESULTS[number] = line
    print(line)
    assert passed, line


def iris_run(kind, seed=1001, workers=1):
    pipe = ModelPipeline(iris_dataset(), seed=seed, workers=workers)
    pipe.select_method(kind)
    pipe.normalize()
    pipe.holdback_validation(0.3, True, seed)
    pipe.select_training()
    pipe.crossvalidate(5, True)
    return pipe


def test_01_iris_quick_start():
    start = time.perf_counter()
    pipe = iris_run("feedforward")
    elapsed = time.perf_counter() - start
    acc = pipe.accuracy(pipe.validation_set)
    err = pipe.validation_error()
    record(1, "iris feedforward quick start", acc >= 0.90 and err < 0.10 and elapsed < 10.0,
           f"accuracy {acc:.4f} >= 0.90, validation MSE {err:.4f} < 0.10, {elapsed:.2f}s < 10s")


def test_02_interchangeability():
    accs = {}
    for kind in ("feedforward", "rbfnetwork", "knn"):
        pipe = iris_run(kind)
        accs[kind] = pipe.accuracy(pipe.validation_set)
    record(2, "interchangeable model kinds on iris", all(a >= 0.85 for a in accs.values()),
           ", ".join(f"{k} {a:.4f}" for k, a in accs.items()) + " (each >= 0.85)")


def _fd_gradient(net, batch, h=1e-4):
    # fourth-order central stencil; the plain two-point rule is noise-limited
    # on small gradient components
    w = net.weights

    def loss(v):
        return mse(net.with_parameters(v), batch)

    out = np.empty_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = h
        out[i] = (8 * (loss(w + e) - loss(w - e)) - (loss(w + 2 * e) - loss(w - 2 * e))) / (12 * h)
    return out


def test_03_gradient_correctness():
    worst = 0.0
    acts = ("sigmoid", "tanh", "linear")
    for seed in range(20):
        rng = DeterministicRng(seed)
        layers = rng.next_range(2, 4)
        sizes = [rng.next_range(1, 6) for _ in range(layers)]
        # every activation appears across the seeds
        chosen = [acts[(seed + j) % 3] for j in range(layers - 1)]
        net = feedforward_init(sizes, chosen, rng)
        batch = PairSet(rng.uniform_array(10 * sizes[0], -1, 1).reshape(10, sizes[0]),
                        rng.uniform_array(10 * sizes[-1], -1, 1).reshape(10, sizes[-1]))
        g = compute_gradient(net, batch).gradient
        fd = _fd_gradient(net, batch)
        keep = np.abs(g) >= 1e-10
        rel = np.abs(g[keep] - fd[keep]) / np.maximum(np.abs(g[keep]), np.abs(fd[keep]))
        worst = max(worst, float(rel.max(initial=0.0)))
    record(3, "backprop gradient vs finite differences", worst < 1e-6,
           f"max relative error {worst:.2e} < 1e-6 over 20 architectures")


def test_04_determinism(tmp_path):
    files = []
    for i, workers in enumerate((1, 1, 4)):
        pipe = iris_run("feedforward", workers=workers)
        path = tmp_path / f"model{i}.json"
        pipe.save(path)
        files.append(path.read_bytes())
    same = files[0] == files[1] == files[2]
    record(4, "byte-identical model files across runs and workers", same,
           f"{len(files[0])} bytes, runs equal {files[0] == files[1]}, "
           f"1 vs 4 workers equal {files[0] == files[2]}")


def test_05_rprop_and_scg_on_xor():
    xor = PairSet([[-1, -1], [-1, 1], [1, -1], [1, 1]], [[-1], [1], [1], [-1]])
    net = feedforward_init([2, 4, 1], ["tanh", "tanh"], DeterministicRng(42))
    net, hist = train_until(ResilientPropagation(), net, xor,
                            StopCondition(max_epochs=1000, target_error=0.01, patience=None))
    rprop_ok = hist.errors[-1] < 0.01
    scg_net = feedforward_init([2, 4, 1], ["tanh", "tanh"], DeterministicRng(42))
    initial = mse(scg_net, xor)
    scg_net, scg_hist = scg_train(scg_net, xor, epochs=1000)
    scg_ok = scg_hist[-1] < initial
    record(5, "RPROP and SCG on XOR", rprop_ok and scg_ok,
           f"RPROP MSE {hist.errors[-1]:.2e} after {hist.epochs} epochs; "
           f"SCG {initial:.4f} -> {scg_hist[-1]:.2e}")


def test_06_equilateral_geometry():
    worst_dist = worst_norm = 0.0
    decode_ok = True
    for n in range(2, 13):
        m = equilateral_matrix(n)
        d = [np.linalg.norm(m[i] - m[j]) for i, j in itertools.combinations(range(n), 2)]
        worst_dist = max(worst_dist, max(d) - min(d))
        worst_norm = max(worst_norm, float(np.abs(np.linalg.norm(m, axis=1) - 1).max()))
        decode_ok &= all(equilateral_decode(m[i], n) == i for i in range(n))
    record(6, "equilateral codes", worst_dist <= 1e-12 and worst_norm <= 1e-12 and decode_ok,
           f"distance spread {worst_dist:.1e}, norm error {worst_norm:.1e}, decode ok {decode_ok}")


def test_07_normalization_round_trip():
    gen = np.random.default_rng(7)
    stats = ColumnStats(-37.5, 81.25, 12.0, 23.7, 100)
    worst = {}
    values = gen.uniform(stats.min, stats.max, 10_000)
    for strategy in (NormalizationStrategy.range(-1, 1), NormalizationStrategy.range(0, 1),
                     NormalizationStrategy.zscore()):
        back = [denormalize_value(normalize_value(x, stats, strategy), stats, strategy)
                for x in values]
        worst[str(strategy)] = float(np.max(np.abs(np.array(back) - values)))
    labels = [f"class{i}" for i in range(7)]
    col = ColumnDefinition("c", 0, ColumnType.nominal, categories=labels,
                           stats=ColumnStats(0, 6, 3, 2, 7))
    draws = gen.integers(0, 7, 10_000)
    for strategy in (NormalizationStrategy.one_of_n(0, 1), NormalizationStrategy.one_of_n(-1, 1),
                     NormalizationStrategy.equilateral(), NormalizationStrategy.passthrough()):
        enc = ColumnEncoder(col, strategy)
        wrong = sum(enc.decode(enc.encode(labels[i])) != labels[i] for i in draws)
        worst[str(strategy)] = float(wrong)
    ok = all(v <= 1e-12 for v in worst.values())
    record(7, "normalization round trip", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_08_blackbox_optimizers():
    def sphere(dim):
        return Objective(lambda x: float(x @ x), dim)

    rosen = Objective(lambda x: float((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2), 2)
    nm = minimize_nelder_mead(rosen, [-1.2, 1.0], max_iter=500)
    pso = minimize_pso(sphere(10), PsoConfig(), DeterministicRng(3), 2000)
    ga = minimize_ga(sphere(5), GaVectorConfig(), DeterministicRng(5), 300)
    sa = minimize_anneal(sphere(5), np.full(5, 5.0), AnnealConfig(), DeterministicRng(11))
    ok = (nm.score < 1e-8 and nm.iterations <= 500 and pso.score < 1e-3 and ga.score < 0.01
          and sa.score < 0.1)
    record(8, "derivative-free optimizers", ok,
           f"Nelder-Mead {nm.score:.1e} in {nm.iterations} it, PSO {pso.score:.1e}, "
           f"GA {ga.score:.1e}, SA {sa.score:.1e}")


def test_09_gp_symbolic_regression():
    x = np.linspace(-1, 1, 20).reshape(-1, 1)
    pairs = PairSet(x, x * x + x)
    hits = []
    for seed in range(13, 18):
        res = evolve(pairs, GpConfig(target_mse=1e-5), rng=DeterministicRng(seed),
                     generations=200)
        hits.append(res.best_mse < 1e-4)
    worst = 0.0
    points = DeterministicRng(1).uniform_array(200, -2, 2).reshape(100, 2)
    pool = ConstantPolicy.from_pool([0.0, 1.0, 2.0, -1.0, 0.5])
    for seed in range(500):
        rng = DeterministicRng(seed)
        tree = generate_tree("grow" if seed % 2 else "full", 2 + seed % 5, 2, DEFAULT_FUNCTIONS,
                             pool, rng)
        before = eval_batch(tree, points)
        after = eval_batch(simplify(tree), points)
        worst = max(worst, float(np.max(np.abs(before - after) / np.maximum(1, np.abs(before)))))
    record(9, "GP recovers x^2 + x; simplify preserves values", sum(hits) >= 3 and worst <= 1e-9,
           f"{sum(hits)}/5 seeds reached MSE < 1e-4, simplify divergence {worst:.1e}")


def test_10_kmeans_blobs():
    gen = np.random.default_rng(10)
    centers = np.array([[0.0, 0.0], [3.0, 0.0], [1.5, 3.0]])
    labels = np.repeat(np.arange(3), 100)
    x = centers[labels] + gen.normal(scale=0.1, size=(300, 2))
    model = kmeans_fit(x, 3, DeterministicRng(10))
    h = model.inertia_history
    monotone = all(b <= a for a, b in zip(h, h[1:]))
    found = model.assign_batch(x)
    agreement = max(np.mean(np.array(p)[found] == labels)
                    for p in itertools.permutations(range(3)))
    record(10, "k-means on separated blobs", monotone and agreement >= 0.95,
           f"inertia non-increasing {monotone} over {len(h)} steps, agreement {agreement:.3f}")


def test_11_oracle_equivalences():
    gen = np.random.default_rng(11)
    x = gen.normal(size=(60, 3))
    y = x @ [1.0, -2.0, 0.5] + 0.3 + 0.1 * gen.normal(size=60)
    pairs = PairSet(x, y[:, None])
    irls = glm_fit_irls(pairs, Link.identity).coefficients
    ols = linreg_fit(pairs).coefficients
    irls_gap = float(np.max(np.abs(irls - ols)))
    net = FeedforwardNetwork([3, 1], "linear", np.zeros(4))
    net, _ = scg_train(net, pairs, epochs=200)
    scg_gap = float(np.max(np.abs(net.weights - ols)))
    model = feedforward_init([3, 4, 1], ["tanh", "linear"], DeterministicRng(11))
    obj = model_loss_objective(model, pairs)
    exact = all(obj.evaluate(v) == calculate_regression_error(model.with_parameters(v), pairs)
                for v in (model.weights, gen.uniform(-1, 1, model.parameter_count)))
    record(11, "oracle equivalences", irls_gap <= 1e-10 and scg_gap <= 1e-6 and exact,
           f"IRLS vs OLS {irls_gap:.1e}, SCG vs normal equations {scg_gap:.1e}, "
           f"loss objective equal {exact}")


def test_12_persistence():
    rng = DeterministicRng(12)
    x = np.random.default_rng(12).normal(size=(40, 3))
    y = x @ [0.5, 1.0, -1.0]
    models = [
        feedforward_init([3, 6, 2], ["tanh", "sigmoid"], rng),
        rbf_from_data(x, 2, rng),
        linreg_fit(PairSet(x, y[:, None])),
        GlmModel(rng.uniform_array(4, -1, 1), Link.logit),
        KnnModel(x, y[:, None], k=3),
        SomModel.random(3, 3, 3, rng),
        KMeansModel(rng.uniform_array(9).reshape(3, 3)),
        GpModel(parse_sexpr("(* (cos x1) (+ x0 0.25))"), 3),
    ]
    queries = np.random.default_rng(99).uniform(-3, 3, size=(100, 3))
    bad = []
    for model in models:
        loaded, _ = loads_model(dumps_model(model), model.kind)
        if loaded.compute_batch(queries).tobytes() != model.compute_batch(queries).tobytes():
            bad.append(model.kind)
    record(12, "save/load/compute bit-identical", not bad,
           f"{len(models) - len(bad)}/{len(models)} kinds identical on 100 inputs")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
