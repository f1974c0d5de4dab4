"""Comparison classifiers: k-nearest neighbours, a linear SVM and a plain MLP."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .autoencoder import iter_batches
from .config import DEFAULT_KNN_K, DEFAULT_SVM, TrainConfig
from .errors import ConfigError, NumericError, ParameterError, ShapeError
from .linalg import Rng, as_matrix
from .sdae import FeedForwardNet, _check_labels, finetune, random_net


@dataclass
class KnnModel:
    train_x: np.ndarray
    train_y: np.ndarray
    k: int = DEFAULT_KNN_K

    def __post_init__(self):
        self.train_x = as_matrix(self.train_x, "train_x")
        self.train_y = np.asarray(self.train_y, dtype=np.int64).reshape(-1)
        n = self.train_x.shape[0]
        if n == 0:
            raise ParameterError("kNN needs at least one training sample")
        if self.train_y.shape[0] != n:
            raise ShapeError(f"{n} training rows but {self.train_y.shape[0]} labels")
        if self.k < 1 or self.k % 2 == 0:
            raise ConfigError(f"k must be a positive odd integer, got {self.k}")
        if self.k > n:
            raise ConfigError(f"k={self.k} exceeds the {n} training samples")


def knn_predict(model: KnnModel, x: np.ndarray) -> np.ndarray:
    """Majority vote over the k Euclidean-nearest training rows.

    Equal distances are ordered by training index (stable sort).
    """
    x = as_matrix(x, "x")
    if x.shape[1] != model.train_x.shape[1]:
        raise ShapeError(f"query has {x.shape[1]} features, model has {model.train_x.shape[1]}")
    labels = np.empty(x.shape[0], dtype=np.int64)
    for i, q in enumerate(x):
        d2 = np.sum((model.train_x - q) ** 2, axis=1)
        nearest = np.argsort(d2, kind="stable")[:model.k]
        labels[i] = int(2 * model.train_y[nearest].sum() > model.k)
    return labels


@dataclass
class LinearSvm:
    w: np.ndarray
    b: float
    # set when training saw a single class; the model then predicts it constantly
    constant: int | None = None

    def decision(self, x: np.ndarray) -> np.ndarray:
        return as_matrix(x, "x") @ self.w + self.b


def svm_objective(model: LinearSvm, x: np.ndarray, y: np.ndarray, l2: float) -> float:
    """``l2 * ||w||^2 + mean(max(0, 1 - t * (w.x + b)))`` with t in {-1, +1}."""
    t = 2.0 * np.asarray(y, dtype=np.float64) - 1.0
    hinge = np.maximum(0.0, 1.0 - t * model.decision(x))
    return float(l2 * model.w @ model.w + hinge.mean())


def svm_train(x: np.ndarray, y: np.ndarray, cfg: TrainConfig = DEFAULT_SVM) -> LinearSvm:
    """Minibatch subgradient descent on the L2-regularised hinge loss.

    Labels {0, 1} are mapped to {-1, +1}.  The row order is reshuffled every
    epoch from ``cfg.seed``; ``cfg.momentum`` is honoured.
    """
    x, y = _check_labels(x, y)
    d = x.shape[1]
    classes = np.unique(y)
    if classes.size == 1:
        warnings.warn("SVM training data holds a single class; returning a constant predictor",
                      RuntimeWarning, stacklevel=2)
        return LinearSvm(np.zeros(d), 0.0, constant=int(classes[0]))
    t = 2.0 * y - 1.0
    w, b = np.zeros(d), 0.0
    vw, vb = np.zeros(d), 0.0
    lr, mu, l2 = cfg.learning_rate, cfg.momentum, cfg.l2_penalty
    rng = Rng(cfg.seed).child("svm-shuffle")
    for _ in range(cfg.epochs):
        for idx in iter_batches(x.shape[0], cfg.batch_size, rng):
            xb, tb = x[idx], t[idx]
            active = (tb * (xb @ w + b)) < 1.0
            gw = 2.0 * l2 * w - (tb[active, None] * xb[active]).sum(axis=0) / len(idx)
            gb = -tb[active].sum() / len(idx)
            vw = mu * vw - lr * gw
            vb = mu * vb - lr * gb
            w = w + vw
            b = b + vb
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise NumericError("SVM training diverged")
    return LinearSvm(w, float(b))


def svm_predict(model: LinearSvm, x: np.ndarray) -> np.ndarray:
    """1 where w.x + b >= 0 (a zero margin counts as the positive class), else 0."""
    x = as_matrix(x, "x")
    if x.shape[1] != model.w.shape[0]:
        raise ShapeError(f"query has {x.shape[1]} features, model has {model.w.shape[0]}")
    if model.constant is not None:
        return np.full(x.shape[0], model.constant, dtype=np.int64)
    return (model.decision(x) >= 0).astype(np.int64)


def mlp_baseline(x: np.ndarray, y: np.ndarray, cfg: TrainConfig, dims: list[int],
                 rng: Rng) -> FeedForwardNet:
    """Same network and training as the proposed method, but randomly initialised."""
    net = random_net(dims, rng)
    finetune(net, x, y, cfg)
    return net
