import numpy as np
import pytest

from sdae_ppi.baselines import (KnnModel, LinearSvm, knn_predict, mlp_baseline, svm_objective,
                                svm_predict, svm_train)
from sdae_ppi.config import PAPER_FINETUNE, TrainConfig
from sdae_ppi.errors import ConfigError, ParameterError
from sdae_ppi.linalg import Rng
from sdae_ppi.sdae import predict


def knn_oracle(train_x, train_y, q, k):
    dists = []
    for i, row in enumerate(train_x):
        dists.append((sum((a - b) ** 2 for a, b in zip(row, q)), i))
    dists.sort()
    votes = [train_y[i] for _, i in dists[:k]]
    return int(sum(votes) * 2 > k)


def test_knn_exact_match_k1():
    x = Rng(0).uniform(10, 3, 0, 1)
    y = np.array([0, 1] * 5)
    model = KnnModel(x, y, k=1)
    assert knn_predict(model, x).tolist() == y.tolist()


def test_knn_unanimous():
    model = KnnModel(Rng(1).uniform(7, 2, 0, 1), np.ones(7), k=5)
    assert set(knn_predict(model, Rng(2).uniform(20, 2, -5, 5)).tolist()) == {1}


def test_knn_hand_set():
    x = np.array([[0, 0], [0, 1], [1, 0], [5, 5], [5, 6], [6, 5]], dtype=float)
    y = np.array([0, 0, 1, 1, 1, 0])
    queries = np.array([[0.2, 0.2], [5.2, 5.2], [2.5, 2.5], [0.9, 0.1], [5.8, 5.1]])
    model = KnnModel(x, y, k=3)
    expected = [knn_oracle(x, y, q, 3) for q in queries]
    assert expected == [0, 1, 0, 0, 1]
    assert knn_predict(model, queries).tolist() == expected


def test_knn_tie_break_by_training_index():
    # all training points equidistant from the query: the first k indices vote
    x = np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]])
    model = KnnModel(x, np.array([1, 1, 0, 0]), k=1)
    assert knn_predict(model, np.zeros((1, 2))).tolist() == [1]
    model = KnnModel(x, np.array([0, 1, 1, 1]), k=1)
    assert knn_predict(model, np.zeros((1, 2))).tolist() == [0]


def test_knn_matches_full_sort_oracle():
    rng = Rng(3)
    x = rng.uniform(200, 4, 0, 1)
    y = (rng.random(200) < 0.5).astype(int)
    q = rng.uniform(50, 4, 0, 1)
    got = knn_predict(KnnModel(x, y, k=5), q)
    assert got.tolist() == [knn_oracle(x, y, row, 5) for row in q]


def test_knn_validation():
    with pytest.raises(ParameterError):
        KnnModel(np.zeros((0, 2)), np.zeros(0), k=1)
    with pytest.raises(ConfigError):
        KnnModel(np.zeros((3, 2)), np.zeros(3), k=4)
    with pytest.raises(ConfigError):
        KnnModel(np.zeros((3, 2)), np.zeros(3), k=5)


def test_svm_separable():
    x = np.array([[0.0, 0.0], [0.2, 0.1], [1.0, 1.0], [0.9, 1.2]])
    y = np.array([0, 0, 1, 1])
    model = svm_train(x, y, TrainConfig(learning_rate=0.1, momentum=0.0, l2_penalty=1e-3,
                                        epochs=300, batch_size=2))
    assert svm_predict(model, x).tolist() == y.tolist()


def test_svm_zero_model_predicts_positive():
    model = LinearSvm(np.zeros(3), 0.0)
    assert svm_predict(model, Rng(0).uniform(5, 3, -1, 1)).tolist() == [1] * 5


def test_svm_single_class_warns():
    with pytest.warns(RuntimeWarning):
        model = svm_train(np.ones((4, 2)), np.zeros(4))
    assert svm_predict(model, np.zeros((3, 2))).tolist() == [0, 0, 0]


def test_svm_objective_non_increasing():
    rng = Rng(7)
    x = rng.uniform(40, 3, 0, 1)
    y = (x[:, 0] + 0.5 * x[:, 1] > 0.8).astype(int)
    cfg = TrainConfig(learning_rate=0.01, momentum=0.0, l2_penalty=1e-3, epochs=1,
                      batch_size=40)
    model = LinearSvm(np.zeros(3), 0.0)
    values = [svm_objective(model, x, y, cfg.l2_penalty)]
    # one full-batch epoch at a time, continuing from the previous weights
    w, b = model.w, model.b
    t = 2.0 * y - 1
    for _ in range(100):
        active = t * (x @ w + b) < 1
        gw = 2 * cfg.l2_penalty * w - (t[active, None] * x[active]).sum(0) / 40
        gb = -t[active].sum() / 40
        w, b = w - cfg.learning_rate * gw, b - cfg.learning_rate * gb
        values.append(svm_objective(LinearSvm(w, b), x, y, cfg.l2_penalty))
    # the library trainer follows the same path
    trained = svm_train(x, y, cfg.replace(epochs=100))
    np.testing.assert_allclose(trained.w, w, atol=1e-12)
    assert all(b2 <= a2 + 1e-12 for a2, b2 in zip(values, values[1:]))


def test_mlp_baseline_deterministic_and_fits():
    rng = Rng(9)
    x = rng.uniform(60, 18, 0, 1)
    y = (x[:, :9].mean(axis=1) > x[:, 9:].mean(axis=1)).astype(int)
    cfg = PAPER_FINETUNE.replace(epochs=300)
    a = mlp_baseline(x, y, cfg, [18, 14, 8, 1], Rng(1))
    b = mlp_baseline(x, y, cfg, [18, 14, 8, 1], Rng(1))
    assert a.architecture == "18-14-8-1"
    for pa, pb in zip(a.params(), b.params()):
        assert np.array_equal(pa, pb)
    assert np.mean(predict(a, x)[0] == y) > 0.9
