"""Grayscale rendering of learned filters as plain PGM (P2) images.

Image rows are input units and columns are hidden units, so column ``j``
shows the weights feeding hidden unit ``j``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DataFormatError

MAXVAL = 255
FLAT_GRAY = 128


def weights_to_pixels(W: np.ndarray) -> np.ndarray:
    """Map ``W.T`` affinely so its min becomes 0 and its max 255, rounding half up.

    A constant matrix renders as uniform gray 128.
    """
    img = np.asarray(W, dtype=np.float64).T
    lo, hi = img.min(), img.max()
    if hi == lo:
        return np.full(img.shape, FLAT_GRAY, dtype=np.int64)
    scaled = (img - lo) * (MAXVAL / (hi - lo))
    return np.clip(np.floor(scaled + 0.5), 0, MAXVAL).astype(np.int64)


def format_pgm(pixels: np.ndarray, comment: str | None = None) -> str:
    height, width = pixels.shape
    lines = ["P2"]
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"{width} {height}")
    lines.append(str(MAXVAL))
    lines.extend(" ".join(str(int(v)) for v in row) for row in pixels)
    return "\n".join(lines) + "\n"


def write_pgm(path, pixels: np.ndarray, comment: str | None = None) -> None:
    Path(path).write_text(format_pgm(pixels, comment))


def read_pgm(path) -> np.ndarray:
    """Parse a plain PGM file, validating the header and every sample."""
    tokens = []
    for line in Path(path).read_text().splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if len(tokens) < 4 or tokens[0] != "P2":
        raise DataFormatError(f"{path}: not a plain PGM (P2) file")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        values = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
    except ValueError:
        raise DataFormatError(f"{path}: non-integer token in PGM body") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise DataFormatError(f"{path}: invalid PGM header")
    if values.size != width * height:
        raise DataFormatError(f"{path}: expected {width * height} samples, found {values.size}")
    if values.min() < 0 or values.max() > maxval:
        raise DataFormatError(f"{path}: sample outside [0, {maxval}]")
    return values.reshape(height, width)
