"""Command-line interface.

Exit codes: 0 success, 2 configuration/usage error, 3 I/O or file-format
error, 4 numeric failure (training diverged), 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as C
from .config import CorruptionKind, CorruptionSpec, LayerSpec, LossKind, TrainConfig
from .data import (Dataset, apply_normalize, fit_normalize, load_csv, merge, sample_negatives,
                   save_csv, synth_generate)
from .errors import (ConfigError, DataFormatError, NumericError, ParameterError, SdaeError,
                     ShapeError)
from .evaluation import METHODS, EvalSettings, run_comparison
from .filters import weights_to_pixels, write_pgm
from .linalg import Rng
from .modelio import load_model, save_model
from .sdae import FeedForwardNet, SdaeStack, finetune, predict, pretrain, random_net, unroll

log = logging.getLogger("sdae_ppi")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _per_level(values, n: int, default_index: int, name: str):
    """Expand a flag value to one entry per DAE level."""
    if values is None:
        paper = [lvl[default_index] for lvl in C.PAPER_LEVELS]
        return [paper[min(i, len(paper) - 1)] for i in range(n)]
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise ConfigError(f"--{name} needs 1 or {n} values, got {len(values)}")
    return values


def _default_layers(dim: int) -> list[int]:
    return [dim] + [lvl[0] for lvl in C.PAPER_LEVELS]


def build_specs(args, dim: int, lr=None, momentum=None, epochs=None) -> list[LayerSpec]:
    dims = args.layers or _default_layers(dim)
    if len(dims) < 2:
        raise ConfigError("--layers needs an input size and at least one hidden size")
    if dims[0] != dim:
        raise ShapeError(f"--layers starts at {dims[0]} inputs but the data has {dim} features")
    n = len(dims) - 1
    nus = _per_level(args.noise_fraction, n, 1, "noise-fraction")
    lrs = _per_level(lr, n, 2, "lr")
    moms = _per_level(momentum, n, 3, "momentum")
    eps = epochs if epochs is not None else [C.DEFAULT_PRETRAIN_EPOCHS]
    eps = [int(e) for e in (eps * n if len(eps) == 1 else eps)]
    if len(eps) != n:
        raise ConfigError(f"epochs needs 1 or {n} values, got {len(eps)}")
    return [
        LayerSpec(dims[i], dims[i + 1],
                  CorruptionSpec(args.noise_kind, nus[i], args.sigma),
                  args.loss,
                  TrainConfig(learning_rate=lrs[i], momentum=moms[i], epochs=eps[i],
                              batch_size=args.batch_size or C.DEFAULT_BATCH_SIZE,
                              seed=args.seed))
        for i in range(n)
    ]


def finetune_config(args) -> TrainConfig:
    d = C.PAPER_FINETUNE
    return TrainConfig(
        learning_rate=d.learning_rate if args.lr is None else args.lr,
        momentum=d.momentum if args.momentum is None else args.momentum,
        l2_penalty=d.l2_penalty if args.l2 is None else args.l2,
        epochs=d.epochs if args.epochs is None else args.epochs,
        batch_size=args.batch_size or d.batch_size,
        seed=Rng(args.seed).child("finetune").seed,
    )


def read_dataset(args) -> Dataset:
    if not args.data:
        raise ConfigError("--data is required")
    ds = load_csv(args.data, skip_header=args.skip_header)
    if getattr(args, "unlabeled", None):
        ds = merge(ds, load_csv(args.unlabeled, dim=ds.dim, has_label_column=False,
                                skip_header=args.skip_header))
    return ds


def ensure_negatives(ds: Dataset, args) -> Dataset:
    """Draw negatives from the unlabeled pool when asked, or when the file has none."""
    ratio = args.neg_ratio
    if ratio is None and ds.n_labeled and ds.n_positive == ds.n_labeled and ds.n_unlabeled:
        ratio = 1.0
    if ratio is None:
        return ds
    log.info("sampling negatives from the unlabeled pool at ratio %g", ratio)
    return sample_negatives(ds, ratio, Rng(args.seed).child("negatives").seed)


def _trace_path(args, suffix: str) -> Path:
    return Path(args.trace) if args.trace else Path(args.out).with_suffix(suffix)


def cmd_synth(args) -> int:
    ds = synth_generate(args.n_labeled, args.n_unlabeled, args.dim, args.latent_dim,
                        args.noise, args.seed)
    save_csv(ds, args.out)
    print(f"wrote {ds.n_labeled} labeled + {ds.n_unlabeled} unlabeled rows to {args.out}")
    return EXIT_OK


def cmd_pretrain(args) -> int:
    ds = read_dataset(args)
    specs = build_specs(args, ds.dim, args.lr, args.momentum, args.epochs)
    rows = np.vstack([ds.labeled_x, ds.unlabeled_x])
    if rows.shape[0] == 0:
        raise ConfigError(f"{args.data} holds no rows to pretrain on")
    norm = fit_normalize(rows)
    stack = pretrain(specs, apply_normalize(norm, rows), Rng(args.seed).child("pretrain"))
    save_model(args.out, stack, norm)
    trace = ["layer,epoch,loss"]
    for i, losses in enumerate(stack.traces):
        trace.extend(f"{i + 1},{e + 1},{v!r}" for e, v in enumerate(losses))
    _trace_path(args, ".trace.csv").write_text("\n".join(trace) + "\n")
    print(f"pretrained {'-'.join(map(str, stack.dims))} stack on {rows.shape[0]} rows "
          f"-> {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    ds = ensure_negatives(read_dataset(args), args)
    if ds.n_labeled == 0:
        raise ConfigError(f"{args.data} holds no labeled rows")
    cfg = finetune_config(args)
    init_rng = Rng(args.seed).child("init")
    if args.no_pretrain:
        dims = args.layers or _default_layers(ds.dim)
        if dims[0] != ds.dim:
            raise ShapeError(f"--layers starts at {dims[0]} inputs but the data has "
                             f"{ds.dim} features")
        net = random_net(list(dims) + [1], init_rng)
        norm = fit_normalize(np.vstack([ds.labeled_x, ds.unlabeled_x]))
    else:
        if not args.model:
            raise ConfigError("--model is required unless --no-pretrain is given")
        stack, norm = load_model(args.model)
        if not isinstance(stack, SdaeStack):
            raise ConfigError(f"{args.model} is not a pretrained stack")
        if stack.dims[0] != ds.dim:
            raise ShapeError(f"model {args.model} expects {stack.dims[0]} features but "
                             f"data {args.data} has {ds.dim}")
        net = unroll(stack, init_rng)
        if norm is None:
            norm = fit_normalize(np.vstack([ds.labeled_x, ds.unlabeled_x]))
    x = apply_normalize(norm, ds.labeled_x)
    report = finetune(net, x, ds.labeled_y, cfg, args.loss_finetune)
    save_model(args.out, net, norm)
    lines = ["epoch,loss,accuracy"]
    lines.extend(f"{e + 1},{l!r},{a!r}"
                 for e, (l, a) in enumerate(zip(report.losses, report.accuracies)))
    _trace_path(args, ".trace.csv").write_text("\n".join(lines) + "\n")
    print(f"trained {net.architecture} network for {cfg.epochs} epochs: "
          f"training accuracy {report.accuracies[-1]:.3f} -> {args.out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    net, norm = load_model(args.model)
    if not isinstance(net, FeedForwardNet):
        raise ConfigError(f"{args.model} is not a trained network")
    ds = read_dataset(args)
    if ds.dim != net.dims[0]:
        raise ShapeError(f"model {args.model} expects {net.dims[0]} features but "
                         f"data {args.data} has {ds.dim}")
    x = np.vstack([ds.labeled_x, ds.unlabeled_x])
    if norm is not None:
        x = apply_normalize(norm, x)
    labels, scores = predict(net, x)
    lines = ["row,score,label"] + [f"{i},{s!r},{l}" for i, (s, l) in
                                   enumerate(zip(scores, labels))]
    out = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    ds = ensure_negatives(read_dataset(args), args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise ConfigError(f"unknown method(s) {unknown}; choose from {', '.join(METHODS)}")
    settings = EvalSettings(
        specs=build_specs(args, ds.dim, args.pretrain_lr, args.pretrain_momentum,
                          args.pretrain_epochs),
        finetune=finetune_config(args),
        knn_k=args.knn_k,
        pooled=args.pooled,
    )
    report = run_comparison(ds, methods, args.k_folds, args.seed, settings)
    text = report.to_text()
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        (out / "models").mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text)
        (out / "report.csv").write_text(report.to_csv())
        for r in report.folds:
            if r.model is not None:
                save_model(out / "models" / f"{r.method}_fold{r.fold + 1}.json", r.model)
    return EXIT_OK


def cmd_visualize(args) -> int:
    model, _ = load_model(args.model)
    weights = ([l.W for l in model.layers] if isinstance(model, SdaeStack)
               else [W for W, _ in model.layers])
    if not 1 <= args.layer <= len(weights):
        raise ConfigError(f"--layer must be between 1 and {len(weights)}, got {args.layer}")
    W = weights[args.layer - 1]
    pixels = weights_to_pixels(W)
    write_pgm(args.out, pixels, f"layer {args.layer}: {W.shape[1]} inputs x {W.shape[0]} "
                                f"hidden units")
    print(f"wrote {pixels.shape[0]}x{pixels.shape[1]} filter image to {args.out}")
    return EXIT_OK


def _g(v) -> str:
    return f"{v:g}" if isinstance(v, float) else str(v)


def render_config(defaults: dict) -> str:
    pre, ft = defaults["pretrain"], defaults["finetune"]
    rows = [["DAE level", "#Hidden neurons", "Input noise fraction", "Learning rate", "momentum"]]
    rows += [[_g(l["level"]), _g(l["hidden_neurons"]), _g(l["input_noise_fraction"]),
              _g(l["learning_rate"]), _g(l["momentum"])] for l in pre]
    ft_rows = [["Architecture", "Activation function", "#epochs", "L2 weight penalty",
                "Learning rate", "momentum"],
               [ft["architecture"], ft["activation_function"], _g(ft["epochs"]),
                _g(ft["l2_weight_penalty"]), _g(ft["learning_rate"]), _g(ft["momentum"])]]

    def table(rs):
        widths = [max(len(r[i]) for r in rs) for i in range(len(rs[0]))]
        return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rs]

    svm = defaults["baselines"]["svm"]
    lines = ["Pretraining (stacked denoising autoencoder)"]
    lines += table(rows)
    lines.append(f"  epochs per level: {pre[0]['epochs']}, batch size: {pre[0]['batch_size']}, "
                 f"noise kind: {pre[0]['noise_kind']}, loss: {pre[0]['loss']}")
    lines.append("")
    lines.append("Fine-tuning (feed-forward network)")
    lines += table(ft_rows)
    lines.append(f"  batch size: {ft['batch_size']}, loss: {ft['loss']}")
    lines.append("")
    lines.append("Baselines")
    lines.append(f"  kNN: k={defaults['baselines']['knn_k']}, euclidean")
    lines.append(f"  linear SVM: learning rate {_g(svm['learning_rate'])}, "
                 f"L2 {_g(svm['l2_penalty'])}, epochs {svm['epochs']}, "
                 f"batch size {svm['batch_size']}")
    lines.append("")
    ev = defaults["evaluation"]
    lines.append(f"Evaluation: stratified {ev['k_folds']}-fold, "
                 f"negative ratio {_g(ev['negative_ratio'])}")
    return "\n".join(lines) + "\n"


def cmd_show_config(args) -> int:
    defaults = C.describe_defaults()
    if args.json:
        sys.stdout.write(json.dumps(defaults, indent=2) + "\n")
    else:
        sys.stdout.write(render_config(defaults))
    return EXIT_OK


def _add_data(p):
    p.add_argument("--data", help="CSV with features and a 1/0/? label column")
    p.add_argument("--unlabeled", help="optional CSV of unlabeled rows (features only)")
    p.add_argument("--skip-header", action="store_true", help="ignore the first data line")


def _add_pretrain_shape(p):
    p.add_argument("--layers", type=_ints, help="layer sizes, e.g. 18,14,8")
    p.add_argument("--noise-kind", choices=[k.value for k in CorruptionKind],
                   default=CorruptionKind.MASKING.value)
    p.add_argument("--noise-fraction", type=_floats,
                   help="masking fraction per level (default 0.4,0.1)")
    p.add_argument("--sigma", type=float, default=C.DEFAULT_SIGMA,
                   help="Gaussian noise std (with --noise-kind gaussian)")
    p.add_argument("--loss", choices=[k.value for k in LossKind],
                   default=LossKind.SQUARED_ERROR.value, help="reconstruction loss")


def _add_finetune(p):
    p.add_argument("--lr", type=float, help="learning rate (default 1)")
    p.add_argument("--momentum", type=float, help="momentum (default 0.5)")
    p.add_argument("--l2", type=float, help="L2 weight penalty (default 0.0007)")
    p.add_argument("--epochs", type=int, help="epochs (default 2000)")
    p.add_argument("--neg-ratio", type=float,
                   help="sample this many negatives per positive from the unlabeled rows")
    p.add_argument("--loss-finetune", choices=[k.value for k in LossKind],
                   default=LossKind.CROSS_ENTROPY.value, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdae-ppi",
        description="Stacked denoising autoencoder pretraining + supervised fine-tuning.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--batch-size", type=int, default=None)
        return p

    p = command("synth", cmd_synth, "generate a synthetic semi-supervised dataset")
    p.add_argument("--n-labeled", type=int, default=100)
    p.add_argument("--n-unlabeled", type=int, default=5000)
    p.add_argument("--dim", type=int, default=C.INPUT_DIM)
    p.add_argument("--latent-dim", type=int, default=4)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--out", required=True)

    p = command("pretrain", cmd_pretrain, "greedy layer-wise DAE pretraining")
    _add_data(p)
    _add_pretrain_shape(p)
    p.add_argument("--lr", type=_floats, help="learning rate per level (default 1,0.5)")
    p.add_argument("--momentum", type=_floats, help="momentum per level (default 0.1,0.1)")
    p.add_argument("--epochs", type=_ints, help="epochs per level (default 100)")
    p.add_argument("--out", required=True, help="stack model file (JSON)")
    p.add_argument("--trace", help="loss trace CSV (default: <out>.trace.csv)")

    p = command("train", cmd_train, "fine-tune a classifier on labeled rows")
    _add_data(p)
    p.add_argument("--model", help="pretrained stack model file")
    p.add_argument("--no-pretrain", action="store_true",
                   help="random initialisation instead of a pretrained stack (MLP baseline)")
    p.add_argument("--layers", type=_ints, help="hidden layout with --no-pretrain")
    _add_finetune(p)
    p.add_argument("--out", required=True, help="network model file (JSON)")
    p.add_argument("--trace", help="training trace CSV (default: <out>.trace.csv)")

    p = command("predict", cmd_predict, "score rows with a trained network")
    _add_data(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="CSV output (default stdout)")

    p = command("evaluate", cmd_evaluate, "k-fold comparison of kNN, SVM, MLP and SDAE")
    _add_data(p)
    _add_pretrain_shape(p)
    p.add_argument("--pretrain-lr", type=_floats)
    p.add_argument("--pretrain-momentum", type=_floats)
    p.add_argument("--pretrain-epochs", type=_ints)
    _add_finetune(p)
    p.add_argument("--k-folds", type=int, default=C.DEFAULT_K_FOLDS)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--knn-k", type=int, default=C.DEFAULT_KNN_K)
    p.add_argument("--pooled", action="store_true",
                   help="pool confusion counts instead of averaging fold metrics")
    p.add_argument("--out", help="output directory for reports and fold models")

    p = command("visualize", cmd_visualize, "render a layer's filters as a PGM image")
    p.add_argument("--model", required=True)
    p.add_argument("--layer", type=int, default=1, help="1-based layer index")
    p.add_argument("--out", required=True)

    p = command("show-config", cmd_show_config, "print the default hyperparameters")
    p.add_argument("--json", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ShapeError, ParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, DataFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except NumericError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except SdaeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
