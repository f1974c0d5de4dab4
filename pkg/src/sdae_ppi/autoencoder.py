"""Single denoising autoencoder layer with tied weights.

Shapes (rows are samples)::

    x, x~ : (n, d)        W   : (d', d)
    y     : (n, d')       b_y : (d',)
    z     : (n, d)        b_z : (d,)

    y = sigmoid(x~ W^T + b_y)          encoder
    z = sigmoid(y W + b_z)             decoder, reuses W (tied)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .config import CorruptionKind, CorruptionSpec, LossKind, TrainConfig
from .errors import NumericError, ParameterError, ShapeError
from .linalg import Rng, as_matrix, matmul, sigmoid

log = logging.getLogger(__name__)

# log() arguments are clamped to [CE_EPS, 1 - CE_EPS]
CE_EPS = 1e-12


@dataclass
class DaeLayer:
    W: np.ndarray
    b_y: np.ndarray
    b_z: np.ndarray

    def __post_init__(self):
        self.W = as_matrix(self.W, "W")
        self.b_y = np.asarray(self.b_y, dtype=np.float64).reshape(-1)
        self.b_z = np.asarray(self.b_z, dtype=np.float64).reshape(-1)
        if self.b_y.shape != (self.W.shape[0],) or self.b_z.shape != (self.W.shape[1],):
            raise ShapeError(
                f"biases {self.b_y.shape}/{self.b_z.shape} do not fit W {self.W.shape}")

    @classmethod
    def initialize(cls, n_visible: int, n_hidden: int, rng: Rng) -> "DaeLayer":
        """Weights uniform in +-1/sqrt(n_visible), biases zero."""
        r = 1.0 / np.sqrt(n_visible)
        return cls(rng.uniform(n_hidden, n_visible, -r, r),
                   np.zeros(n_hidden), np.zeros(n_visible))

    @property
    def n_visible(self) -> int:
        return self.W.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.W.shape[0]

    def params(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.W, self.b_y, self.b_z

    def copy(self) -> "DaeLayer":
        return DaeLayer(self.W.copy(), self.b_y.copy(), self.b_z.copy())

    def encode(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.n_visible:
            raise ShapeError(f"encode expects (n, {self.n_visible}) input, got {x.shape}")
        return sigmoid(matmul(x, self.W.T) + self.b_y)

    def decode(self, y: np.ndarray) -> np.ndarray:
        if y.ndim != 2 or y.shape[1] != self.n_hidden:
            raise ShapeError(f"decode expects (n, {self.n_hidden}) input, got {y.shape}")
        return sigmoid(matmul(y, self.W) + self.b_z)

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        return self.decode(self.encode(x))


def encode(layer: DaeLayer, x: np.ndarray) -> np.ndarray:
    return layer.encode(x)


def decode(layer: DaeLayer, y: np.ndarray) -> np.ndarray:
    return layer.decode(y)


def corrupt(x: np.ndarray, spec: CorruptionSpec, rng: Rng) -> np.ndarray:
    """Draw x~ ~ q(x~|x).

    Masking zeroes every component independently with probability ``spec.nu``
    (so ``nu`` is the expected, not exact, fraction).  ``NONE`` returns ``x``
    itself.
    """
    if spec.kind is CorruptionKind.NONE:
        return x
    rows, cols = x.shape
    if spec.kind is CorruptionKind.MASKING:
        return np.where(rng.bernoulli(rows, cols, spec.nu), 0.0, x)
    return x + rng.gaussian(rows, cols, spec.sigma)


def _check_same_shape(x, z):
    if x.shape != z.shape:
        raise ShapeError(f"shape mismatch: {x.shape} vs {z.shape}")


def loss(x: np.ndarray, z: np.ndarray, kind: LossKind) -> float:
    """Reconstruction loss, summed over components and averaged over samples.

    Cross-entropy is the usual ``-sum(x log z + (1-x) log(1-z))``.  It needs
    ``x`` and ``z`` in [0, 1]; ``z`` is clamped away from 0 and 1 before the log.
    """
    _check_same_shape(x, z)
    n = x.shape[0]
    if n == 0:
        raise ParameterError("loss of an empty batch is undefined")
    if LossKind(kind) is LossKind.SQUARED_ERROR:
        return float(np.sum((x - z) ** 2) / n)
    if np.any((x < 0) | (x > 1)) or np.any((z < 0) | (z > 1)):
        raise ParameterError("cross-entropy needs inputs and reconstructions in [0, 1]")
    zc = np.clip(z, CE_EPS, 1.0 - CE_EPS)
    return float(-np.sum(x * np.log(zc) + (1.0 - x) * np.log(1.0 - zc)) / n)


class DaeGradients(NamedTuple):
    W: np.ndarray
    b_y: np.ndarray
    b_z: np.ndarray


def _loss_and_grads(layer: DaeLayer, x_clean, x_corrupt, kind):
    _check_same_shape(x_clean, x_corrupt)
    n = x_clean.shape[0]
    y = layer.encode(x_corrupt)
    z = layer.decode(y)
    value = loss(x_clean, z, kind)
    if kind is LossKind.SQUARED_ERROR:
        d_out = 2.0 * (z - x_clean) * z * (1.0 - z)
    else:
        d_out = z - x_clean  # sigmoid + cross-entropy
    d_hidden = matmul(d_out, layer.W.T) * y * (1.0 - y)
    # tied weights: decoder path (y^T d_out) plus encoder path (d_hidden^T x~)
    gW = (matmul(y.T, d_out) + matmul(d_hidden.T, x_corrupt)) / n
    return value, DaeGradients(gW, d_hidden.sum(axis=0) / n, d_out.sum(axis=0) / n)


def dae_gradients(layer: DaeLayer, x_clean: np.ndarray, x_corrupt: np.ndarray,
                  kind: LossKind = LossKind.SQUARED_ERROR) -> DaeGradients:
    """Batch-averaged gradient of L(x, g(f(x~))) w.r.t. (W, b_y, b_z)."""
    return _loss_and_grads(layer, x_clean, x_corrupt, LossKind(kind))[1]


@dataclass
class TrainReport:
    losses: list[float] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)


def iter_batches(n: int, batch_size: int, rng: Rng):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def train_dae(layer: DaeLayer, data: np.ndarray, spec: CorruptionSpec, kind: LossKind,
              cfg: TrainConfig, rng: Rng) -> TrainReport:
    """Train ``layer`` in place by minibatch SGD with classical momentum.

    Each epoch reshuffles the rows and draws fresh corruption for every
    minibatch.  The returned trace holds, per epoch, the mean reconstruction
    loss of the minibatches seen during that epoch.  ``cfg.l2_penalty`` is
    ignored here; weight decay only applies during fine-tuning.
    """
    data = as_matrix(data, "data")
    kind = LossKind(kind)
    n = data.shape[0]
    if n == 0:
        raise ParameterError("cannot train on an empty matrix")
    if data.shape[1] != layer.n_visible:
        raise ShapeError(f"layer expects {layer.n_visible} features, data has {data.shape[1]}")

    params = layer.params()
    velocity = [np.zeros_like(p) for p in params]
    lr, mu = cfg.learning_rate, cfg.momentum
    report = TrainReport()
    for epoch in range(cfg.epochs):
        total = 0.0
        # overflow is caught by the finiteness check below
        with np.errstate(over="ignore", invalid="ignore"):
            for idx in iter_batches(n, cfg.batch_size, rng):
                xb = data[idx]
                value, grads = _loss_and_grads(layer, xb, corrupt(xb, spec, rng), kind)
                total += value * len(idx)
                for p, v, g in zip(params, velocity, grads):
                    v *= mu
                    v -= lr * g
                    p += v
        report.losses.append(total / n)
        if not all(np.isfinite(p).all() for p in params):
            raise NumericError(f"DAE parameters diverged at epoch {epoch + 1}")
        log.debug("dae %d->%d epoch %d loss %.6f",
                  layer.n_visible, layer.n_hidden, epoch + 1, report.losses[-1])
    return report
