"""Training hyperparameters and the default two-level profile.

Defaults for the pretraining levels and for fine-tuning are the published
settings of the HIV-1/human PPI experiment (18-14-8-1 sigmoid network).
Values the original setup leaves open are marked below.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from enum import Enum

from .errors import ConfigError


class CorruptionKind(str, Enum):
    MASKING = "masking"
    GAUSSIAN = "gaussian"
    NONE = "none"


class LossKind(str, Enum):
    SQUARED_ERROR = "squared_error"
    CROSS_ENTROPY = "cross_entropy"


@dataclass(frozen=True)
class CorruptionSpec:
    """Input corruption process q(x~|x).

    ``nu`` is the masking fraction (each component zeroed independently with
    probability ``nu``); ``sigma`` is the std of additive Gaussian noise.
    Only the field matching ``kind`` is used.
    """

    kind: CorruptionKind = CorruptionKind.MASKING
    nu: float = 0.0
    sigma: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "kind", CorruptionKind(self.kind))
        if not 0.0 <= self.nu <= 1.0:
            raise ConfigError(f"masking fraction must lie in [0, 1], got {self.nu}")
        if self.sigma < 0:
            raise ConfigError(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class TrainConfig:
    """SGD-with-momentum settings.

    ``l2_penalty`` applies to weight matrices only, never to biases.  A zero
    learning rate is accepted (it freezes the parameters), which is handy for
    tests.
    """

    learning_rate: float = 1.0
    momentum: float = 0.5
    l2_penalty: float = 0.0
    epochs: int = 100
    batch_size: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ConfigError(f"learning rate must be >= 0, got {self.learning_rate}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.l2_penalty < 0:
            raise ConfigError(f"L2 penalty must be >= 0, got {self.l2_penalty}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ConfigError(f"epochs must be a positive integer, got {self.epochs}")
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise ConfigError(f"batch size must be a positive integer, got {self.batch_size}")

    def replace(self, **changes) -> "TrainConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class LayerSpec:
    input_dim: int
    hidden_dim: int
    corruption: CorruptionSpec = field(default_factory=CorruptionSpec)
    loss: LossKind = LossKind.SQUARED_ERROR
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.input_dim < 1 or self.hidden_dim < 1:
            raise ConfigError(
                f"layer dims must be positive, got {self.input_dim}->{self.hidden_dim}")
        object.__setattr__(self, "loss", LossKind(self.loss))


def check_chain(specs) -> None:
    """Raise ConfigError unless each spec's hidden_dim feeds the next input_dim."""
    for i in range(len(specs) - 1):
        if specs[i].hidden_dim != specs[i + 1].input_dim:
            raise ConfigError(
                f"layer {i + 1} outputs {specs[i].hidden_dim} units but layer {i + 2} "
                f"expects {specs[i + 1].input_dim} inputs")


# Pretraining epochs per level are not published; 100 is our choice.
DEFAULT_PRETRAIN_EPOCHS = 100
DEFAULT_BATCH_SIZE = 10
DEFAULT_SIGMA = 0.1
DEFAULT_K_FOLDS = 5
DEFAULT_KNN_K = 5
INPUT_DIM = 18

# (hidden units, masking fraction, learning rate, momentum) per DAE level
PAPER_LEVELS = ((14, 0.4, 1.0, 0.1), (8, 0.1, 0.5, 0.1))

FINETUNE_ACTIVATION = "sigmoid"
PAPER_FINETUNE = TrainConfig(
    learning_rate=1.0, momentum=0.5, l2_penalty=0.0007, epochs=2000,
    batch_size=DEFAULT_BATCH_SIZE)

# The SVM baseline has no published settings.
DEFAULT_SVM = TrainConfig(
    learning_rate=0.01, momentum=0.0, l2_penalty=1e-3, epochs=200,
    batch_size=DEFAULT_BATCH_SIZE)


def paper_layer_specs(
    input_dim: int = INPUT_DIM,
    epochs: int = DEFAULT_PRETRAIN_EPOCHS,
    kind: CorruptionKind = CorruptionKind.MASKING,
    sigma: float = DEFAULT_SIGMA,
    loss: LossKind = LossKind.SQUARED_ERROR,
) -> list[LayerSpec]:
    specs = []
    prev = input_dim
    for hidden, nu, lr, mom in PAPER_LEVELS:
        specs.append(LayerSpec(
            input_dim=prev,
            hidden_dim=hidden,
            corruption=CorruptionSpec(kind=kind, nu=nu, sigma=sigma),
            loss=loss,
            train=TrainConfig(learning_rate=lr, momentum=mom, epochs=epochs,
                              batch_size=DEFAULT_BATCH_SIZE),
        ))
        prev = hidden
    return specs


def architecture(dims) -> str:
    return "-".join(str(d) for d in dims)


def describe_defaults() -> dict:
    """Plain-data dump of the default profile (used by ``show-config``)."""
    specs = paper_layer_specs()
    return {
        "pretrain": [
            {
                "level": i + 1,
                "hidden_neurons": s.hidden_dim,
                "input_noise_fraction": s.corruption.nu,
                "learning_rate": s.train.learning_rate,
                "momentum": s.train.momentum,
                "epochs": s.train.epochs,
                "batch_size": s.train.batch_size,
                "noise_kind": s.corruption.kind.value,
                "loss": s.loss.value,
            }
            for i, s in enumerate(specs)
        ],
        "finetune": {
            "architecture": architecture([INPUT_DIM] + [s.hidden_dim for s in specs] + [1]),
            "activation_function": FINETUNE_ACTIVATION,
            "epochs": PAPER_FINETUNE.epochs,
            "l2_weight_penalty": PAPER_FINETUNE.l2_penalty,
            "learning_rate": PAPER_FINETUNE.learning_rate,
            "momentum": PAPER_FINETUNE.momentum,
            "batch_size": PAPER_FINETUNE.batch_size,
            "loss": LossKind.CROSS_ENTROPY.value,
        },
        "baselines": {
            "knn_k": DEFAULT_KNN_K,
            "svm": asdict(DEFAULT_SVM),
        },
        "evaluation": {"k_folds": DEFAULT_K_FOLDS, "negative_ratio": 1.0},
    }
