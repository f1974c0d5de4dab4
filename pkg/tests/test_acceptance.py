"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line; the full list prints in the pytest
terminal summary under "acceptance criteria".
"""

import time

import numpy as np
import pytest

from helpers import central_difference, confusion_loop, max_relative_error
from sdae_ppi.autoencoder import DaeLayer, corrupt, dae_gradients, loss, train_dae
from sdae_ppi.cli import main
from sdae_ppi.config import (PAPER_FINETUNE, CorruptionSpec, LossKind, TrainConfig,
                             paper_layer_specs)
from sdae_ppi.data import Dataset, sample_negatives, synth_generate
from sdae_ppi.evaluation import EvalSettings, compute_metrics, kfold_split, run_comparison
from sdae_ppi.filters import read_pgm
from sdae_ppi.linalg import Rng
from sdae_ppi.modelio import load_model
from sdae_ppi.sdae import classification_loss, net_gradients, random_net

GRAD_TOL = 1e-4
FD_STEP = 1e-5


def test_01_dae_gradients(accept):
    start = time.perf_counter()
    worst = 0.0
    specs = [CorruptionSpec("masking", nu=0.3), CorruptionSpec("gaussian", sigma=0.2)]
    for i in range(20):
        rng = Rng(1000 + i)
        layer = DaeLayer(rng.uniform(4, 6, -1, 1), rng.uniform(1, 4, -0.5, 0.5),
                         rng.uniform(1, 6, -0.5, 0.5))
        x = rng.uniform(3, 6, 0, 1)
        for spec in specs:
            xt = corrupt(x, spec, rng)
            for kind in LossKind:
                analytic = dae_gradients(layer, x, xt, kind)
                numeric = central_difference(
                    lambda: loss(x, layer.reconstruct(xt), kind), list(layer.params()), FD_STEP)
                worst = max(worst, max_relative_error(analytic, numeric))
    elapsed = time.perf_counter() - start
    accept(1, "DAE analytic gradients vs central differences",
           worst < GRAD_TOL and elapsed < 5.0,
           f"max rel err {worst:.2e} < {GRAD_TOL:g}, {elapsed:.2f}s < 5s")


def test_02_network_gradients(accept):
    start = time.perf_counter()
    rng = Rng(2024)
    net = random_net([18, 14, 8, 1], rng)
    for W, b in net.layers:
        W *= 3
        b += rng.uniform(1, b.size, -0.5, 0.5)[0]
    x = rng.uniform(3, 18, 0, 1)
    y = np.array([1.0, 0.0, 1.0])
    _, analytic = net_gradients(net, x, y)
    numeric = central_difference(lambda: classification_loss(net.scores(x), y),
                                 net.params(), FD_STEP)
    worst = max_relative_error(analytic, numeric)
    elapsed = time.perf_counter() - start
    accept(2, "18-14-8-1 backprop vs central differences",
           worst < GRAD_TOL and elapsed < 10.0,
           f"max rel err {worst:.2e} < {GRAD_TOL:g}, {elapsed:.2f}s < 10s")


def test_03_denoising_training_reduces_loss(accept):
    start = time.perf_counter()
    ratios = []
    for seed in range(5):
        data = synth_generate(0, 200, seed=seed).unlabeled_x
        rng = Rng(seed)
        layer = DaeLayer.initialize(18, 14, rng)
        report = train_dae(layer, data, CorruptionSpec("masking", nu=0.4),
                           LossKind.SQUARED_ERROR,
                           TrainConfig(learning_rate=0.1, momentum=0.1, epochs=50), rng)
        ratios.append(report.losses[-1] / report.losses[0])
    elapsed = time.perf_counter() - start
    ok = all(r <= 0.8 for r in ratios) and elapsed < 30.0
    accept(3, "DAE 18->14, nu=0.4, 50 epochs: final loss >= 20% below first",
           ok, f"final/first {', '.join(f'{r:.3f}' for r in ratios)}; {elapsed:.1f}s < 30s")


@pytest.mark.slow
def test_04_pretraining_beats_random_init(accept):
    start = time.perf_counter()
    wins, rows = 0, []
    for seed in range(5):
        ds = synth_generate(100, 5000, dim=18, latent_dim=4, noise=0.3, seed=seed)
        settings = EvalSettings(specs=paper_layer_specs(epochs=20),
                                finetune=PAPER_FINETUNE.replace(epochs=200))
        report = run_comparison(ds, ["mlp", "proposed"], k=5, seed=seed, settings=settings)
        mlp = report.summary("mlp").accuracy
        prop = report.summary("proposed").accuracy
        wins += prop >= mlp
        rows.append(f"{prop:.3f} vs {mlp:.3f}")
    elapsed = time.perf_counter() - start
    accept(4, "pretrained net >= random-init MLP (5-fold mean accuracy), >= 4 of 5 seeds",
           wins >= 4 and elapsed < 600,
           f"{wins}/5 wins; proposed vs mlp: {'; '.join(rows)}; {elapsed:.0f}s < 600s")


def test_05_metrics_oracle(accept):
    rng = Rng(55)
    worst = 0.0
    counts_ok = True
    for _ in range(1000):
        n = 1 + int(rng.random(1)[0] * 50)
        pred = (rng.random(n) < 0.5).astype(int)
        truth = (rng.random(n) < 0.5).astype(int)
        m = compute_metrics(pred, truth)
        tp, tn, fp, fn, acc, prec, rec = confusion_loop(pred, truth)
        counts_ok &= (m.tp, m.tn, m.fp, m.fn) == (tp, tn, fp, fn)
        worst = max(worst, abs(m.accuracy - acc), abs(m.precision - prec), abs(m.recall - rec))
    fixed = compute_metrics([1, 1, 1, 0, 0, 0, 0, 1, 0, 0], [1, 1, 1, 0, 0, 0, 0, 0, 1, 1])
    exact = (fixed.accuracy, fixed.precision, fixed.recall) == (0.7, 0.75, 0.6)
    accept(5, "compute_metrics vs brute-force confusion loop",
           counts_ok and worst <= 1e-12 and exact,
           f"max diff {worst:.1e} <= 1e-12; tp3/tn4/fp1/fn2 -> "
           f"({fixed.accuracy}, {fixed.precision}, {fixed.recall})")


def test_06_corruption_statistics(accept):
    masked = corrupt(np.ones((10_000, 18)), CorruptionSpec("masking", nu=0.4), Rng(6))
    frac = float(np.mean(masked == 0))
    noisy = corrupt(np.zeros((100_000, 1)), CorruptionSpec("gaussian", sigma=1.0), Rng(7))
    std = float(noisy.std())
    accept(6, "masking fraction and Gaussian std",
           abs(frac - 0.4) <= 0.01 and abs(std - 1.0) <= 0.02,
           f"zeroed {frac:.4f} in 0.4+-0.01; std {std:.4f} in 1+-0.02")


def test_07_stratified_folds(accept):
    rng = Rng(77)
    pool = Dataset(18, rng.uniform(158, 18, 0, 1), np.ones(158, dtype=int),
                   rng.uniform(1000, 18, 0, 1))
    ds = sample_negatives(pool, 1.0, seed=7)
    plan = kfold_split(ds.labeled_y, k=5, seed=7)
    folds = [plan.test_indices(f) for f in range(5)]
    partition = sorted(np.concatenate(folds).tolist()) == list(range(ds.n_labeled))
    pos = [int(ds.labeled_y[f].sum()) for f in folds]
    accept(7, "158+158 stratified 5-fold split",
           ds.n_labeled == 316 and partition and set(pos) <= {31, 32},
           f"per-fold positives {pos}; partition={partition}")


def test_08_evaluate_is_deterministic(accept, tmp_path):
    data = tmp_path / "d.csv"
    main(["synth", "--n-labeled", "40", "--n-unlabeled", "400", "--seed", "8",
          "--out", str(data)])
    outs = [tmp_path / "run1", tmp_path / "run2"]
    for out in outs:
        code = main(["evaluate", "--data", str(data), "--seed", "8", "--pretrain-epochs", "3",
                     "--epochs", "30", "--out", str(out)])
        assert code == 0
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in files)
    models = [f for f in files if f.suffix == ".json"]
    accept(8, "two identical evaluate runs give identical bytes",
           same and len(models) == 10 and (outs[1] / "report.txt").exists(),
           f"{len(files)} files compared ({len(models)} model files)")


def test_09_filter_images(accept, tmp_path):
    data = tmp_path / "d.csv"
    main(["synth", "--n-labeled", "20", "--n-unlabeled", "300", "--seed", "9",
          "--out", str(data)])
    model = tmp_path / "stack.json"
    main(["pretrain", "--data", str(data), "--epochs", "3", "--out", str(model)])
    stack, _ = load_model(model)
    ok, shapes = True, []
    for layer in (1, 2):
        out = tmp_path / f"layer{layer}.pgm"
        ok &= main(["visualize", "--model", str(model), "--layer", str(layer),
                    "--out", str(out)]) == 0
        px = read_pgm(out)
        W = stack.layers[layer - 1].W
        ok &= px.shape == (W.shape[1], W.shape[0]) and px.min() == 0 and px.max() == 255
        shapes.append(f"{px.shape[0]}x{px.shape[1]}")
    accept(9, "PGM filter images span 0..255 with input x hidden dims", bool(ok),
           f"images {', '.join(shapes)}")


def test_10_show_config(accept, capsys):
    assert main(["show-config"]) == 0
    rows = [line.split() for line in capsys.readouterr().out.splitlines()]
    table2 = [["1", "14", "0.4", "1", "0.1"], ["2", "8", "0.1", "0.5", "0.1"]]
    table3 = ["18-14-8-1", "sigmoid", "2000", "0.0007", "1", "0.5"]
    ok = all(r in rows for r in table2) and table3 in rows
    accept(10, "show-config reproduces the published hyperparameter tables", ok,
           "level rows 14/0.4/1/0.1, 8/0.1/0.5/0.1; 18-14-8-1 sigmoid 2000 0.0007 1 0.5")
