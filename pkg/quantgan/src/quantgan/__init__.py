"""quantgan: TCN-based adversarial generator emitting log-price path
ensembles in the evaluation pipeline's file format."""

from .generate import generate, paths_from_returns, sample_returns, write_ensemble
from .preprocess import Preprocess, decode, encode, fit_preprocess
from .tcn import TCN
from .train import (
    GanConfig,
    load_checkpoint,
    load_returns_csv,
    parameter_digest,
    save_checkpoint,
    train,
)

__version__ = "0.1.0"
