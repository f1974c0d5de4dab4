"""Stratified k-fold cross-validation and the accuracy/precision/recall report."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .baselines import KnnModel, knn_predict, mlp_baseline, svm_predict, svm_train
from .config import (DEFAULT_K_FOLDS, DEFAULT_KNN_K, DEFAULT_SVM, PAPER_FINETUNE, LayerSpec,
                     TrainConfig, paper_layer_specs)
from .data import Dataset, NormStats, apply_normalize, fit_normalize
from .errors import ConfigError, ShapeError
from .linalg import Rng
from .sdae import FeedForwardNet, SdaeStack, finetune, predict, pretrain, unroll

log = logging.getLogger(__name__)

METHODS = ("knn", "svm", "mlp", "proposed")
METHOD_TITLES = {"knn": "kNN", "svm": "SVM", "mlp": "MLP", "proposed": "Proposed method"}


@dataclass(frozen=True)
class Metrics:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float
    precision: float
    recall: float

    @classmethod
    def from_counts(cls, tp: int, tn: int, fp: int, fn: int) -> "Metrics":
        total = tp + tn + fp + fn
        return cls(tp, tn, fp, fn,
                   accuracy=(tp + tn) / total if total else 0.0,
                   precision=tp / (tp + fp) if tp + fp else 0.0,
                   recall=tp / (tp + fn) if tp + fn else 0.0)


def compute_metrics(pred, truth) -> Metrics:
    """Confusion counts for the positive class 1.  Empty denominators give 0."""
    pred = np.asarray(pred).reshape(-1)
    truth = np.asarray(truth).reshape(-1)
    if pred.shape != truth.shape:
        raise ShapeError(f"{pred.shape[0]} predictions vs {truth.shape[0]} labels")
    if pred.size == 0:
        raise ShapeError("cannot score an empty prediction vector")
    p, t = pred == 1, truth == 1
    return Metrics.from_counts(int(np.sum(p & t)), int(np.sum(~p & ~t)),
                               int(np.sum(p & ~t)), int(np.sum(~p & t)))


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def kfold_split(labels, k: int = DEFAULT_K_FOLDS, seed: int = 0) -> FoldPlan:
    """Stratified shuffled fold assignment.

    Each class is shuffled and dealt round-robin over the folds; the dealing
    position carries over from one class to the next so fold sizes also stay
    within one of each other.
    """
    labels = np.asarray(labels).reshape(-1)
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    assignments = np.empty(labels.shape[0], dtype=np.int64)
    rng = Rng(seed).child("folds")
    offset = 0
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            raise ConfigError(f"class {cls} has {members.size} samples, fewer than k={k}")
        members = members[rng.permutation(members.size)]
        assignments[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    return FoldPlan(k, assignments, seed)


@dataclass
class EvalSettings:
    specs: list[LayerSpec] = field(default_factory=paper_layer_specs)
    finetune: TrainConfig = PAPER_FINETUNE
    svm: TrainConfig = DEFAULT_SVM
    knn_k: int = DEFAULT_KNN_K
    pooled: bool = False


@dataclass
class FoldResult:
    method: str
    fold: int
    metrics: Metrics
    model: FeedForwardNet | None = None


@dataclass
class ComparisonReport:
    methods: list[str]
    k: int
    seed: int
    folds: list[FoldResult]
    provenance: list[str] = field(default_factory=list)
    pooled: bool = False

    def results(self, method: str) -> list[FoldResult]:
        return [r for r in self.folds if r.method == method]

    def summary(self, method: str) -> Metrics:
        """Mean over folds (or pooled counts when ``pooled`` is set)."""
        ms = [r.metrics for r in self.results(method)]
        tp, tn, fp, fn = (sum(getattr(m, a) for m in ms) for a in ("tp", "tn", "fp", "fn"))
        if self.pooled:
            return Metrics.from_counts(tp, tn, fp, fn)
        return Metrics(tp, tn, fp, fn,
                       accuracy=float(np.mean([m.accuracy for m in ms])),
                       precision=float(np.mean([m.precision for m in ms])),
                       recall=float(np.mean([m.recall for m in ms])))

    def to_text(self) -> str:
        avg = "pooled" if self.pooled else "mean of folds"
        lines = [f"# {p}" for p in self.provenance]
        lines.append(f"# {self.k}-fold cross-validation, seed={self.seed}, {avg}")
        lines.append(f"{'Predictor':<17}{'Accuracy':>10}{'Precision':>11}{'Recall':>8}")
        for m in self.methods:
            s = self.summary(m)
            lines.append(f"{METHOD_TITLES[m]:<17}{s.accuracy * 100:>9.1f}%"
                         f"{s.precision:>11.2f}{s.recall:>8.2f}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["method,fold,accuracy,precision,recall,tp,tn,fp,fn"]

        def row(method, fold, m):
            return (f"{method},{fold},{m.accuracy!r},{m.precision!r},{m.recall!r},"
                    f"{m.tp},{m.tn},{m.fp},{m.fn}")

        for m in self.methods:
            for r in self.results(m):
                lines.append(row(m, r.fold, r.metrics))
            lines.append(row(m, "pooled" if self.pooled else "mean", self.summary(m)))
        return "\n".join(lines) + "\n"


def _fit_fold(method: str, x_tr, y_tr, x_te, unlabeled, settings: EvalSettings,
              rng: Rng, ft_seed: int):
    dims = [x_tr.shape[1]] + [s.hidden_dim for s in settings.specs] + [1]
    if method == "knn":
        return knn_predict(KnnModel(x_tr, y_tr, settings.knn_k), x_te), None
    if method == "svm":
        return svm_predict(svm_train(x_tr, y_tr, settings.svm.replace(seed=ft_seed)), x_te), None
    cfg = settings.finetune.replace(seed=ft_seed)
    if method == "mlp":
        net = mlp_baseline(x_tr, y_tr, cfg, dims, rng.child("init"))
    else:
        stack = pretrain(settings.specs, np.vstack([x_tr, unlabeled]), rng.child("pretrain"))
        net = unroll(stack, rng.child("init"))
        finetune(net, x_tr, y_tr, cfg)
    return predict(net, x_te)[0], net


def run_comparison(dataset: Dataset, methods=METHODS, k: int = DEFAULT_K_FOLDS, seed: int = 0,
                   settings: EvalSettings | None = None) -> ComparisonReport:
    """Cross-validate every method on the same folds.

    Per fold, min-max scaling is fitted on the training labeled rows plus the
    unlabeled pool (never on held-out rows).  The proposed method pretrains on
    the training labeled rows together with the unlabeled pool.  The MLP and
    the proposed method share the fine-tuning seed and configuration; they
    differ only in where the hidden-layer weights come from.
    """
    settings = settings or EvalSettings()
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    if dataset.n_labeled == 0:
        raise ConfigError("dataset has no labeled rows")
    if settings.specs and settings.specs[0].input_dim != dataset.dim:
        raise ShapeError(f"layer specs expect {settings.specs[0].input_dim} features, "
                         f"dataset has {dataset.dim}")
    plan = kfold_split(dataset.labeled_y, k, seed)
    root = Rng(seed)
    results = []
    for fold in range(k):
        tr, te = plan.train_indices(fold), plan.test_indices(fold)
        stats: NormStats = fit_normalize(np.vstack([dataset.labeled_x[tr], dataset.unlabeled_x]))
        x_tr = apply_normalize(stats, dataset.labeled_x[tr])
        x_te = apply_normalize(stats, dataset.labeled_x[te])
        unl = apply_normalize(stats, dataset.unlabeled_x)
        y_tr, y_te = dataset.labeled_y[tr], dataset.labeled_y[te]
        ft_seed = root.child("finetune", fold).seed
        for m in methods:
            pred, net = _fit_fold(m, x_tr, y_tr, x_te, unl, settings,
                                  root.child(m, fold), ft_seed)
            metrics = compute_metrics(pred, y_te)
            log.info("fold %d %s accuracy %.3f", fold + 1, m, metrics.accuracy)
            results.append(FoldResult(m, fold, metrics, net))
    return ComparisonReport(methods, k, seed, results, list(dataset.provenance), settings.pooled)
