"""Dense float64 matrix helpers and a self-contained seeded PRNG.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64 with
samples as rows, i.e. a batch is ``(n_samples, n_features)``.

``matmul`` accumulates over the shared dimension in a fixed order
(k = 0, 1, ..., K-1) using separate multiply and add steps, so its result is
bit-identical to the naive triple loop and does not depend on the BLAS build.

The random generator is SplitMix64 (Steele, Lea & Flood 2014).  Its state is
a 64-bit counter advanced by the odd constant ``0x9E3779B97F4A7C15``; each
output is that counter passed through a fixed xor-shift-multiply finalizer.
Because output ``i`` depends only on ``seed + i * gamma`` the stream can be
produced in vectorised blocks and is identical on every platform.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import ParameterError, ShapeError

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 2.0 * np.pi


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a C-contiguous float64 2-D array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with a fixed k-ordered summation."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.float64)
    for k in range(a.shape[1]):
        out += a[:, k, None] * b[None, k, :]
    return out


_LOW = np.finfo(np.float64).tiny
_HIGH = 1.0 - np.finfo(np.float64).epsneg


def sigmoid(m: np.ndarray) -> np.ndarray:
    """Logistic function, kept strictly inside (0, 1) under saturation."""
    m = np.asarray(m, dtype=np.float64)
    e = np.exp(-np.abs(m))
    out = np.where(m >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return np.clip(out, _LOW, _HIGH)


def _splitmix_finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def mix_seed(*parts) -> int:
    """Fold integers and strings into a single 64-bit seed."""
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode("utf-8"))
        h.update(b"\x00")
    return int.from_bytes(h.digest()[:8], "little")


class Rng:
    """SplitMix64 generator.  Single-owner, mutable."""

    def __init__(self, seed: int = 0):
        if not isinstance(seed, (int, np.integer)):
            raise ParameterError(f"seed must be an integer, got {seed!r}")
        self.seed = int(seed) & _MASK64
        self.state = self.seed

    def __repr__(self):
        return f"Rng(seed={self.seed}, state={self.state:#018x})"

    def child(self, *labels) -> "Rng":
        """Independent stream keyed by this generator's seed and ``labels``.

        Does not advance ``self``.
        """
        return Rng(mix_seed(self.seed, *labels))

    def next_u64(self, n: int) -> np.ndarray:
        """Return the next ``n`` raw 64-bit outputs."""
        if n < 0:
            raise ParameterError("n must be non-negative")
        steps = np.arange(1, n + 1, dtype=np.uint64)
        # uint64 array arithmetic wraps modulo 2**64, which is what we want
        counters = np.uint64(self.state) + steps * np.uint64(_GAMMA)
        self.state = (self.state + n * _GAMMA) & _MASK64
        return _splitmix_finalize(counters)

    def random(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1) built from the top 53 bits."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self, rows: int, cols: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        if not lo < hi:
            raise ParameterError(f"uniform requires lo < hi, got lo={lo}, hi={hi}")
        u = self.random(rows * cols).reshape(rows, cols)
        out = lo + (hi - lo) * u
        # rounding can land exactly on hi
        return np.where(out >= hi, np.nextafter(hi, lo), out)

    def gaussian(self, rows: int, cols: int, sigma: float = 1.0) -> np.ndarray:
        """N(0, sigma^2) samples via the Box-Muller transform (both branches used)."""
        if sigma < 0:
            raise ParameterError(f"sigma must be >= 0, got {sigma}")
        n = rows * cols
        pairs = (n + 1) // 2
        u = self.random(2 * pairs)
        radius = np.sqrt(-2.0 * np.log1p(-u[:pairs]))  # 1 - u lies in (0, 1]
        angle = _TWO_PI * u[pairs:]
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
        return sigma * z.reshape(rows, cols)

    def bernoulli(self, rows: int, cols: int, p: float) -> np.ndarray:
        """Boolean matrix, each entry True with probability ``p``."""
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"probability must lie in [0, 1], got {p}")
        return self.random(rows * cols).reshape(rows, cols) < p

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of ``range(n)`` (argsort of random keys)."""
        return np.argsort(self.next_u64(n), kind="stable")

    def choice(self, n: int, size: int) -> np.ndarray:
        """``size`` distinct indices from ``range(n)``."""
        if size > n:
            raise ParameterError(f"cannot draw {size} distinct items from {n}")
        return self.permutation(n)[:size]


def rng_uniform(rng: Rng, rows: int, cols: int, lo: float, hi: float) -> np.ndarray:
    return rng.uniform(rows, cols, lo, hi)


def rng_gaussian(rng: Rng, rows: int, cols: int, sigma: float) -> np.ndarray:
    return rng.gaussian(rows, cols, sigma)
