"""Semi-supervised PPI classification with stacked denoising autoencoders."""

from .autoencoder import DaeLayer, corrupt, dae_gradients, decode, encode, loss, train_dae
from .config import CorruptionKind, CorruptionSpec, LayerSpec, LossKind, TrainConfig
from .data import Dataset, apply_normalize, fit_normalize, load_csv, save_csv, synth_generate
from .evaluation import Metrics, compute_metrics, kfold_split, run_comparison
from .linalg import Rng, matmul, sigmoid
from .sdae import FeedForwardNet, SdaeStack, finetune, predict, pretrain, represent, unroll

__version__ = "0.1.0"
