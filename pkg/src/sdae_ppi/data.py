"""Labeled/unlabeled datasets, CSV I/O, min-max scaling and a synthetic generator.

CSV layout: comma separated, no header (optionally one header line to skip),
``dim`` float columns followed by a label column holding ``1``, ``0`` or ``?``
(unlabeled).  Lines starting with ``#`` are comments; they are collected into
``Dataset.provenance``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DataFormatError, ParameterError, ShapeError
from .linalg import Rng, as_matrix, matmul, sigmoid

LABEL_TOKENS = {"1": 1, "0": 0, "?": None}


def _rows(a, dim: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return np.zeros((0, dim))
    if a.ndim != 2 or a.shape[1] != dim:
        raise ShapeError(f"expected rows of {dim} features, got shape {a.shape}")
    return a


@dataclass
class Dataset:
    dim: int
    labeled_x: np.ndarray
    labeled_y: np.ndarray
    unlabeled_x: np.ndarray
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.labeled_x = _rows(self.labeled_x, self.dim)
        self.unlabeled_x = _rows(self.unlabeled_x, self.dim)
        self.labeled_y = np.asarray(self.labeled_y, dtype=np.int64).reshape(-1)
        if self.labeled_y.shape[0] != self.labeled_x.shape[0]:
            raise ShapeError(f"{self.labeled_x.shape[0]} labeled rows but "
                             f"{self.labeled_y.shape[0]} labels")

    @property
    def n_labeled(self) -> int:
        return self.labeled_x.shape[0]

    @property
    def n_unlabeled(self) -> int:
        return self.unlabeled_x.shape[0]

    @property
    def n_positive(self) -> int:
        return int(self.labeled_y.sum())


def _parse_float(tok: str, path, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise DataFormatError(f"{path}:{lineno}: non-numeric feature {tok!r}") from None
    if not np.isfinite(v):
        raise DataFormatError(f"{path}:{lineno}: non-finite feature {tok!r}")
    return v


def load_csv(path, dim: int | None = None, has_label_column: bool = True,
             skip_header: bool = False) -> Dataset:
    """Read a dataset.  ``dim`` is inferred from the first data row when omitted."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise OSError(f"cannot read {path}: {e.strerror or e}") from e
    provenance, labeled, labels, unlabeled = [], [], [], []
    header_pending = skip_header
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            provenance.append(line[1:].strip())
            continue
        if not line:
            continue
        if header_pending:
            header_pending = False
            continue
        fields = [f.strip() for f in line.split(",")]
        if dim is None:
            dim = len(fields) - 1 if has_label_column else len(fields)
            if dim < 1:
                raise DataFormatError(f"{path}:{lineno}: row has no feature columns")
        expected = dim + 1 if has_label_column else dim
        if len(fields) != expected:
            raise DataFormatError(
                f"{path}:{lineno}: expected {expected} fields ({dim} features"
                f"{' + label' if has_label_column else ''}), found {len(fields)}")
        row = [_parse_float(t, path, lineno) for t in fields[:dim]]
        if not has_label_column:
            unlabeled.append(row)
            continue
        token = fields[dim]
        if token not in LABEL_TOKENS:
            raise DataFormatError(f"{path}:{lineno}: unknown label {token!r} (use 1, 0 or ?)")
        if LABEL_TOKENS[token] is None:
            unlabeled.append(row)
        else:
            labeled.append(row)
            labels.append(LABEL_TOKENS[token])
    dim = dim or 0
    return Dataset(dim, np.array(labeled), np.array(labels, dtype=np.int64),
                   np.array(unlabeled), provenance)


def save_csv(dataset: Dataset, path) -> None:
    """Write the unified format; floats use ``repr`` so they round-trip exactly."""
    lines = [f"# {p}" for p in dataset.provenance]
    for row, label in zip(dataset.labeled_x, dataset.labeled_y):
        lines.append(",".join(repr(float(v)) for v in row) + f",{int(label)}")
    for row in dataset.unlabeled_x:
        lines.append(",".join(repr(float(v)) for v in row) + ",?")
    Path(path).write_text("\n".join(lines) + "\n")


def merge(labeled: Dataset, unlabeled: Dataset) -> Dataset:
    """Combine a labeled file with a separate unlabeled file."""
    if labeled.dim != unlabeled.dim:
        raise ShapeError(f"labeled data has {labeled.dim} features, unlabeled has {unlabeled.dim}")
    return Dataset(labeled.dim, labeled.labeled_x, labeled.labeled_y,
                   np.vstack([labeled.unlabeled_x, unlabeled.unlabeled_x,
                              unlabeled.labeled_x]),
                   labeled.provenance + unlabeled.provenance)


def sample_negatives(dataset: Dataset, ratio: float, seed: int) -> Dataset:
    """Draw ``round(ratio * positives)`` unlabeled rows and relabel them 0.

    For data that only ships positives and an unlabeled pool.  Drawn rows are
    removed from the unlabeled pool.
    """
    if ratio <= 0:
        raise ParameterError(f"negative ratio must be positive, got {ratio}")
    n_neg = int(round(ratio * dataset.n_positive))
    if n_neg > dataset.n_unlabeled:
        raise ParameterError(f"need {n_neg} negatives but only {dataset.n_unlabeled} "
                             "unlabeled rows are available")
    pick = np.sort(Rng(seed).child("negatives").choice(dataset.n_unlabeled, n_neg))
    keep = np.ones(dataset.n_unlabeled, dtype=bool)
    keep[pick] = False
    return replace(
        dataset,
        labeled_x=np.vstack([dataset.labeled_x, dataset.unlabeled_x[pick]]),
        labeled_y=np.concatenate([dataset.labeled_y, np.zeros(n_neg, dtype=np.int64)]),
        unlabeled_x=dataset.unlabeled_x[keep],
        provenance=dataset.provenance + [
            f"negatives sampled from unlabeled pool: ratio={ratio:g} n={n_neg} seed={seed}"],
    )


@dataclass(frozen=True)
class NormStats:
    min: np.ndarray
    max: np.ndarray


def fit_normalize(train_x: np.ndarray) -> NormStats:
    x = as_matrix(train_x, "train_x")
    if x.shape[0] == 0:
        raise ParameterError("cannot fit normalization on zero rows")
    return NormStats(x.min(axis=0), x.max(axis=0))


def apply_normalize(stats: NormStats, x: np.ndarray) -> np.ndarray:
    """Affine map of each feature onto [0, 1], clamped.  Constant features map to 0.5."""
    x = as_matrix(x, "x")
    if x.shape[1] != stats.min.shape[0]:
        raise ShapeError(f"stats cover {stats.min.shape[0]} features, data has {x.shape[1]}")
    span = stats.max - stats.min
    flat = span == 0
    # a subnormal span can overflow to +-inf; the clip below handles it
    with np.errstate(over="ignore"):
        scaled = (x - stats.min) / np.where(flat, 1.0, span)
    scaled[:, flat] = 0.5
    return np.clip(scaled, 0.0, 1.0)


def _latent_label(u: np.ndarray) -> np.ndarray:
    # inside a disc of area 2 in the (u0, u1) square [-1, 1]^2: half the mass
    return (u[:, 0] ** 2 + u[:, 1] ** 2 < 2.0 / np.pi).astype(np.int64)


def synth_generate(n_labeled: int = 100, n_unlabeled: int = 5000, dim: int = 18,
                   latent_dim: int = 4, noise: float = 0.3, seed: int = 0) -> Dataset:
    """Latent factor data: ``x = sigmoid(u A^T + eps)``.

    ``u`` is uniform on [-1, 1]^latent_dim, ``A`` is a fixed (seeded) Gaussian
    mixing matrix and ``eps`` is N(0, noise^2).  The label is 1 when
    ``(u0, u1)`` lies inside a centred disc.  Labeled rows are drawn by
    rejection so that exactly ceil(n/2) of them are positive.
    """
    if latent_dim < 2 or latent_dim >= dim:
        raise ParameterError(f"need 2 <= latent_dim < dim, got latent_dim={latent_dim}, dim={dim}")
    if n_labeled < 0 or n_unlabeled < 0 or noise < 0:
        raise ParameterError("sizes and noise must be non-negative")
    root = Rng(seed)
    mixing = root.child("mixing").gaussian(dim, latent_dim, 2.5 / np.sqrt(latent_dim))

    def observe(u, rng):
        return sigmoid(matmul(u, mixing.T) + rng.gaussian(u.shape[0], dim, noise))

    rng = root.child("labeled")
    quota = {1: (n_labeled + 1) // 2, 0: n_labeled // 2}
    kept_u, kept_y = [], []
    while quota[0] or quota[1]:
        u = rng.uniform(max(2 * n_labeled, 16), latent_dim, -1.0, 1.0)
        for row, lab in zip(u, _latent_label(u)):
            if quota[int(lab)]:
                quota[int(lab)] -= 1
                kept_u.append(row)
                kept_y.append(lab)
    u_lab = np.array(kept_u).reshape(n_labeled, latent_dim)
    labeled_x = observe(u_lab, rng)

    rng = root.child("unlabeled")
    unlabeled_x = observe(rng.uniform(n_unlabeled, latent_dim, -1.0, 1.0), rng)
    note = (f"synth n_labeled={n_labeled} n_unlabeled={n_unlabeled} dim={dim} "
            f"latent_dim={latent_dim} noise={noise:g} seed={seed}")
    return Dataset(dim, labeled_x, np.array(kept_y, dtype=np.int64), unlabeled_x, [note])
