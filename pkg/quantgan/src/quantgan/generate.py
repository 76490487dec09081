"""Path generation and the ensemble wire format.

Paths are log-prices: a leading zero followed by the cumulative sum of
de-normalized generated returns, so path[t] - path[t-1] reproduces the
t-th return exactly.  Files use the evaluation-side ensemble format:
CSV (one path per row, `# generator=... frequency=...` header) or binary
(magic LMP1, little-endian u32 path count and length, row-major float64).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import torch

from .preprocess import Preprocess, decode
from .tcn import TCN
from .train import GanConfig

_MAGIC = b"LMP1"


def sample_returns(ckpt: dict, n_paths: int, n_returns: int, seed: int,
                   batch: int = 64) -> np.ndarray:
    """Draw (n_paths, n_returns) returns from a checkpoint, deterministically."""
    cfg = GanConfig(**ckpt["config"])
    pp = Preprocess.from_dict(ckpt["preprocess"])
    g_net = TCN(cfg.latent_dim, 1, cfg.hidden, cfg.n_blocks)
    g_net.load_state_dict(ckpt["generator"])
    g_net.eval()
    rng = torch.Generator().manual_seed(seed)
    warm = cfg.receptive_field
    out = np.empty((n_paths, n_returns))
    with torch.no_grad():
        for lo in range(0, n_paths, batch):
            hi = min(lo + batch, n_paths)
            noise = torch.randn(hi - lo, cfg.latent_dim, n_returns + warm,
                                generator=rng)
            raw = g_net(noise)[:, 0, warm:].numpy()
            out[lo:hi] = decode(raw, pp)
    return out


def paths_from_returns(returns: np.ndarray) -> np.ndarray:
    zeros = np.zeros((returns.shape[0], 1))
    return np.concatenate([zeros, np.cumsum(returns, axis=1)], axis=1)


def generate(ckpt: dict, n_paths: int, length: int, seed: int = 0) -> np.ndarray:
    """n_paths log-price paths of the given length (length-1 returns each)."""
    if length < 2:
        raise ValueError("length must be at least 2")
    return paths_from_returns(sample_returns(ckpt, n_paths, length - 1, seed))


def write_ensemble(paths: np.ndarray, out_path, generator_label: str = "quantgan",
                   frequency: str = "daily") -> Path:
    out_path = Path(out_path)
    paths = np.asarray(paths, dtype=float)
    if out_path.suffix.lower() == ".csv":
        with out_path.open("w", encoding="utf-8") as fh:
            fh.write(f"# generator={generator_label} frequency={frequency}\n")
            for row in paths:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    else:
        with out_path.open("wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<II", paths.shape[0], paths.shape[1]))
            fh.write(np.ascontiguousarray(paths, dtype="<f8").tobytes())
    return out_path
