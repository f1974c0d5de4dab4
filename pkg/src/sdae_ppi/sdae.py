"""Greedy stacking of DAE layers and the unrolled feed-forward classifier."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .autoencoder import CE_EPS, DaeLayer, TrainReport, iter_batches, train_dae
from .config import LayerSpec, LossKind, TrainConfig, architecture, check_chain
from .errors import ConfigError, NumericError, ParameterError, ShapeError
from .linalg import Rng, as_matrix, matmul, sigmoid

log = logging.getLogger(__name__)


@dataclass
class SdaeStack:
    layers: list[DaeLayer] = field(default_factory=list)
    specs: list[LayerSpec] = field(default_factory=list)
    traces: list[list[float]] = field(default_factory=list)
    # ("train", i) / ("encode", i) events in the order they happened
    history: list[tuple[str, int]] = field(default_factory=list)

    @property
    def dims(self) -> list[int]:
        if not self.layers:
            return []
        return [self.layers[0].n_visible] + [l.n_hidden for l in self.layers]

    def represent(self, x: np.ndarray) -> np.ndarray:
        return represent(self, x)


def pretrain(specs: list[LayerSpec], unlabeled: np.ndarray, rng: Rng) -> SdaeStack:
    """Greedy layer-wise DAE pretraining.

    Layer ``i`` is trained on the clean encoding of ``unlabeled`` by layers
    ``0..i-1``; corruption only touches that layer's own input.  Layer ``i``
    is finished before layer ``i+1`` is created.
    """
    if not specs:
        raise ConfigError("need at least one layer spec")
    check_chain(specs)
    h = as_matrix(unlabeled, "unlabeled")
    if h.shape[1] != specs[0].input_dim:
        raise ShapeError(
            f"first layer expects {specs[0].input_dim} features, data has {h.shape[1]}")
    stack = SdaeStack()
    for i, spec in enumerate(specs):
        layer_rng = rng.child("pretrain-layer", i)
        layer = DaeLayer.initialize(spec.input_dim, spec.hidden_dim, layer_rng)
        stack.history.append(("train", i))
        report = train_dae(layer, h, spec.corruption, spec.loss, spec.train, layer_rng)
        log.info("pretrained layer %d (%d->%d): loss %.5f -> %.5f", i + 1,
                 spec.input_dim, spec.hidden_dim, report.losses[0], report.losses[-1])
        stack.layers.append(layer)
        stack.specs.append(spec)
        stack.traces.append(report.losses)
        if i + 1 < len(specs):
            stack.history.append(("encode", i))
            h = layer.encode(h)
    return stack


def represent(stack: SdaeStack, x: np.ndarray) -> np.ndarray:
    """Run ``x`` through every encoder of the stack (identity for an empty stack)."""
    h = as_matrix(x, "x")
    for layer in stack.layers:
        h = layer.encode(h)
    return h


class Dense(NamedTuple):
    W: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)


@dataclass
class FeedForwardNet:
    """Sigmoid MLP; every layer (including the output) is sigmoid."""

    layers: list[Dense]

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("a network needs at least one layer")
        self.layers = [Dense(as_matrix(W, "W"), np.asarray(b, dtype=np.float64).reshape(-1))
                       for W, b in self.layers]
        for i, (W, b) in enumerate(self.layers):
            if b.shape != (W.shape[0],):
                raise ShapeError(f"layer {i + 1}: bias {b.shape} does not fit W {W.shape}")
            if i and W.shape[1] != self.layers[i - 1].W.shape[0]:
                raise ShapeError(f"layer {i + 1} input {W.shape[1]} does not chain "
                                 f"to previous output {self.layers[i - 1].W.shape[0]}")
        if self.layers[-1].W.shape[0] != 1:
            raise ConfigError("the output layer must have exactly one unit")

    @property
    def dims(self) -> list[int]:
        return [self.layers[0].W.shape[1]] + [W.shape[0] for W, _ in self.layers]

    @property
    def architecture(self) -> str:
        return architecture(self.dims)

    def params(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer]

    def copy(self) -> "FeedForwardNet":
        return FeedForwardNet([Dense(W.copy(), b.copy()) for W, b in self.layers])

    def forward(self, x: np.ndarray) -> list[np.ndarray]:
        """Activations of every layer, input first."""
        if x.ndim != 2 or x.shape[1] != self.dims[0]:
            raise ShapeError(f"network expects (n, {self.dims[0]}) input, got {x.shape}")
        acts = [x]
        for W, b in self.layers:
            acts.append(sigmoid(matmul(acts[-1], W.T) + b))
        return acts

    def scores(self, x: np.ndarray) -> np.ndarray:
        return self.forward(as_matrix(x, "x"))[-1][:, 0]


def classification_loss(scores: np.ndarray, y: np.ndarray,
                        kind: LossKind = LossKind.CROSS_ENTROPY) -> float:
    if LossKind(kind) is LossKind.SQUARED_ERROR:
        return float(np.mean((scores - y) ** 2))
    s = np.clip(scores, CE_EPS, 1.0 - CE_EPS)
    return float(-np.mean(y * np.log(s) + (1.0 - y) * np.log(1.0 - s)))


def net_gradients(net: FeedForwardNet, x: np.ndarray, y: np.ndarray,
                  kind: LossKind = LossKind.CROSS_ENTROPY):
    """Backpropagation.  Returns ``(loss, grads)`` with grads aligned to ``net.params()``.

    The loss is the batch mean of the per-sample loss; no L2 term is included.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    acts = net.forward(x)
    out = acts[-1]
    value = classification_loss(out[:, 0], y, kind)
    n = x.shape[0]
    t = y[:, None]
    if LossKind(kind) is LossKind.SQUARED_ERROR:
        delta = 2.0 * (out - t) * out * (1.0 - out)
    else:
        delta = out - t
    grads: list[np.ndarray] = []
    for i in range(len(net.layers) - 1, -1, -1):
        W, _ = net.layers[i]
        a_in = acts[i]
        grads.append(delta.sum(axis=0) / n)
        grads.append(matmul(delta.T, a_in) / n)
        if i:
            delta = matmul(delta, W) * a_in * (1.0 - a_in)
    grads.reverse()
    return value, grads


def unroll(stack: SdaeStack, rng: Rng) -> FeedForwardNet:
    """Copy the encoders verbatim and append a random single-unit output layer.

    Decoder biases are discarded.
    """
    if not stack.layers:
        raise ConfigError("cannot unroll an empty stack")
    layers = [Dense(l.W.copy(), l.b_y.copy()) for l in stack.layers]
    fan_in = stack.layers[-1].n_hidden
    layers.append(_random_dense(fan_in, 1, rng))
    return FeedForwardNet(layers)


def _random_dense(fan_in: int, fan_out: int, rng: Rng) -> Dense:
    r = 1.0 / np.sqrt(fan_in)
    return Dense(rng.uniform(fan_out, fan_in, -r, r), np.zeros(fan_out))


def random_net(dims: list[int], rng: Rng) -> FeedForwardNet:
    """Network with every layer drawn like a fresh DAE encoder (uniform +-1/sqrt(fan_in))."""
    if len(dims) < 2:
        raise ConfigError(f"need at least two layer sizes, got {dims}")
    return FeedForwardNet([_random_dense(a, b, rng) for a, b in zip(dims[:-1], dims[1:])])


def _check_labels(x, y):
    x = as_matrix(x, "labeled_x")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape[0] == 0:
        raise ParameterError("labeled set is empty")
    if y.shape[0] != x.shape[0]:
        raise ShapeError(f"{x.shape[0]} rows but {y.shape[0]} labels")
    if not np.all((y == 0) | (y == 1)):
        raise ParameterError("labels must be 0 or 1")
    return x, y


def finetune(net: FeedForwardNet, labeled_x: np.ndarray, labeled_y: np.ndarray,
             cfg: TrainConfig, loss: LossKind = LossKind.CROSS_ENTROPY) -> TrainReport:
    """Supervised backpropagation over every layer, in place.

    Update rule per minibatch: ``v = mu*v - lr*(g + l2*W)``, ``theta += v``
    (biases get no L2 term).  Rows are reshuffled each epoch with a generator
    seeded from ``cfg.seed``.  The report holds the full-set loss (without the
    L2 term) and accuracy after each epoch.
    """
    x, y = _check_labels(labeled_x, labeled_y)
    rng = Rng(cfg.seed).child("finetune-shuffle")
    params = net.params()
    is_weight = [i % 2 == 0 for i in range(len(params))]
    velocity = [np.zeros_like(p) for p in params]
    lr, mu, l2 = cfg.learning_rate, cfg.momentum, cfg.l2_penalty
    report = TrainReport()
    for epoch in range(cfg.epochs):
        with np.errstate(over="ignore", invalid="ignore"):
            for idx in iter_batches(x.shape[0], cfg.batch_size, rng):
                _, grads = net_gradients(net, x[idx], y[idx], loss)
                for p, v, g, w in zip(params, velocity, grads, is_weight):
                    if w and l2:
                        g = g + l2 * p
                    v *= mu
                    v -= lr * g
                    p += v
            s = net.scores(x)
        if not np.all(np.isfinite(s)) or not all(np.isfinite(p).all() for p in params):
            raise NumericError(f"fine-tuning diverged at epoch {epoch + 1}")
        report.losses.append(classification_loss(s, y, loss))
        report.accuracies.append(float(np.mean((s >= 0.5) == (y == 1))))
    if report.losses:
        log.info("finetuned %s: loss %.5f acc %.3f", net.architecture,
                 report.losses[-1], report.accuracies[-1])
    return report


def predict(net: FeedForwardNet, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Labels and scores.  Label is 1 iff the score is >= 0.5 (0.5 itself maps to 1)."""
    scores = net.scores(x)
    return (scores >= 0.5).astype(np.int64), scores
