"""JSON model files for pretrained stacks and fine-tuned networks.

Layout::

    {
      "format": "sdae-ppi-model",
      "version": 1,
      "kind": "stack" | "network",
      "architecture": "18-14-8",
      "layers": [
        {"input_dim": 18, "output_dim": 14,
         "weights": [... output_dim*input_dim floats, row-major (output, input) ...],
         "bias": [...], "decoder_bias": [...],        # decoder_bias: stacks only
         "corruption": {...}, "loss": "...", "train": {...}}   # stacks only
      ],
      "normalization": {"min": [...], "max": [...]}   # optional
    }

Floats are written with ``repr`` so every value round-trips exactly; keys are
sorted so identical models give identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .autoencoder import DaeLayer
from .config import CorruptionSpec, LayerSpec, TrainConfig, architecture
from .data import NormStats
from .errors import DataFormatError
from .sdae import Dense, FeedForwardNet, SdaeStack

FORMAT = "sdae-ppi-model"
VERSION = 1


def _floats(a) -> list[float]:
    return [float(v) for v in np.asarray(a).reshape(-1)]


def _spec_dict(spec: LayerSpec) -> dict:
    return {
        "corruption": {"kind": spec.corruption.kind.value, "nu": spec.corruption.nu,
                       "sigma": spec.corruption.sigma},
        "loss": spec.loss.value,
        "train": asdict(spec.train),
    }


def model_to_dict(model, norm: NormStats | None = None) -> dict:
    if isinstance(model, SdaeStack):
        kind = "stack"
        layers = []
        for layer, spec in zip(model.layers, model.specs):
            entry = {"input_dim": layer.n_visible, "output_dim": layer.n_hidden,
                     "weights": _floats(layer.W), "bias": _floats(layer.b_y),
                     "decoder_bias": _floats(layer.b_z)}
            entry.update(_spec_dict(spec))
            layers.append(entry)
    elif isinstance(model, FeedForwardNet):
        kind = "network"
        layers = [{"input_dim": W.shape[1], "output_dim": W.shape[0], "activation": "sigmoid",
                   "weights": _floats(W), "bias": _floats(b)} for W, b in model.layers]
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    doc = {"format": FORMAT, "version": VERSION, "kind": kind,
           "architecture": architecture(model.dims), "layers": layers}
    if norm is not None:
        doc["normalization"] = {"min": _floats(norm.min), "max": _floats(norm.max)}
    return doc


def dumps(model, norm: NormStats | None = None) -> str:
    return json.dumps(model_to_dict(model, norm), sort_keys=True, indent=1) + "\n"


def save_model(path, model, norm: NormStats | None = None) -> None:
    Path(path).write_text(dumps(model, norm))


def _array(entry: dict, key: str, shape, where: str) -> np.ndarray:
    try:
        values = np.array(entry[key], dtype=np.float64)
    except KeyError:
        raise DataFormatError(f"{where}: missing {key!r}") from None
    except (TypeError, ValueError):
        raise DataFormatError(f"{where}: {key!r} is not a list of numbers") from None
    expected = int(np.prod(shape))
    if values.ndim != 1 or values.size != expected:
        raise DataFormatError(f"{where}: {key!r} holds {values.size} values, "
                              f"expected {expected} for shape {tuple(shape)}")
    if not np.all(np.isfinite(values)):
        raise DataFormatError(f"{where}: {key!r} contains non-finite values")
    return values.reshape(shape)


def model_from_dict(doc: dict):
    """Return ``(model, norm_stats_or_None)``; raises DataFormatError on any inconsistency."""
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise DataFormatError("not an sdae-ppi model file")
    if doc.get("version") != VERSION:
        raise DataFormatError(f"unsupported model version {doc.get('version')!r}")
    kind = doc.get("kind")
    entries = doc.get("layers")
    if kind not in ("stack", "network") or not isinstance(entries, list) or not entries:
        raise DataFormatError("model file needs a kind and a non-empty layer list")
    dims = []
    built = []
    for i, e in enumerate(entries):
        where = f"layer {i + 1}"
        try:
            n_in, n_out = int(e["input_dim"]), int(e["output_dim"])
        except (KeyError, TypeError, ValueError):
            raise DataFormatError(f"{where}: missing or invalid input_dim/output_dim") from None
        if n_in < 1 or n_out < 1:
            raise DataFormatError(f"{where}: dims must be positive")
        if dims and dims[-1] != n_in:
            raise DataFormatError(
                f"{where}: input_dim {n_in} does not match previous output_dim {dims[-1]}")
        if not dims:
            dims.append(n_in)
        dims.append(n_out)
        W = _array(e, "weights", (n_out, n_in), where)
        b = _array(e, "bias", (n_out,), where)
        if kind == "stack":
            b_z = _array(e, "decoder_bias", (n_in,), where)
            try:
                c = e["corruption"]
                spec = LayerSpec(n_in, n_out,
                                 CorruptionSpec(c["kind"], c["nu"], c["sigma"]),
                                 e["loss"], TrainConfig(**e["train"]))
            except (KeyError, TypeError, ValueError) as err:
                raise DataFormatError(f"{where}: bad layer settings ({err})") from None
            built.append((DaeLayer(W, b, b_z), spec))
        else:
            built.append(Dense(W, b))
    if doc.get("architecture") != architecture(dims):
        raise DataFormatError(f"architecture {doc.get('architecture')!r} does not match "
                              f"layer dims {architecture(dims)}")
    if kind == "stack":
        model = SdaeStack([l for l, _ in built], [s for _, s in built])
    else:
        if dims[-1] != 1:
            raise DataFormatError("network output layer must have one unit")
        model = FeedForwardNet(built)
    norm = None
    if "normalization" in doc:
        nd = doc["normalization"]
        norm = NormStats(_array(nd, "min", (dims[0],), "normalization"),
                         _array(nd, "max", (dims[0],), "normalization"))
    return model, norm


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path}: invalid JSON ({e})") from None
    return model_from_dict(doc)
