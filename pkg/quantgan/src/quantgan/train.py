"""Adversarial training of the TCN generator on a return series."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .preprocess import fit_preprocess, encode
from .tcn import TCN

log = logging.getLogger(__name__)

_MIN_LEN = {"daily": 512, "weekly": 512, "monthly": 256}


@dataclass(frozen=True)
class GanConfig:
    receptive_field: int = 127
    latent_dim: int = 3
    hidden: int = 40
    n_blocks: int = 6
    batch_size: int = 64
    steps: int = 300
    seed: int = 0
    lr_g: float = 2e-4
    lr_d: float = 1e-4
    window: int = 127

    def validate(self, series_len: int) -> None:
        for name in ("receptive_field", "latent_dim", "hidden", "n_blocks",
                     "batch_size", "seed", "lr_g", "lr_d", "window"):
            if getattr(self, name) < 0 or (name not in ("seed",) and getattr(self, name) == 0):
                raise ValueError(f"{name} must be positive")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.receptive_field > self.window:
            raise ValueError("receptive_field cannot exceed the training window")
        if self.window > series_len:
            raise ValueError("training window longer than the series")


def load_returns_csv(path) -> np.ndarray:
    """Read a ReturnSeries CSV (`value` header, one return per line)."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if lines and lines[0].strip().lower() == "value":
        lines = lines[1:]
    return np.array([float(v) for v in lines])


def _windows(data: torch.Tensor, window: int, batch: int, gen: torch.Generator):
    starts = torch.randint(0, data.numel() - window + 1, (batch,), generator=gen)
    return torch.stack([data[s : s + window] for s in starts]).unsqueeze(1)


def train(returns: np.ndarray, cfg: GanConfig, frequency: str = "daily") -> dict:
    """Alternating generator/discriminator optimization; returns a checkpoint.

    The checkpoint records the preprocessing scheme and both state dicts.
    Divergence (non-finite loss) aborts and returns the last good state.
    """
    min_len = _MIN_LEN.get(frequency, 512)
    if returns.size < min_len:
        raise ValueError(
            f"need at least {min_len} returns for {frequency} training, got {returns.size}"
        )
    cfg.validate(returns.size)

    torch.manual_seed(cfg.seed)
    torch.use_deterministic_algorithms(True)
    gen_rng = torch.Generator().manual_seed(cfg.seed)

    pp = fit_preprocess(returns)
    data = torch.tensor(encode(returns, pp), dtype=torch.float32)

    g_net = TCN(cfg.latent_dim, 1, cfg.hidden, cfg.n_blocks)
    d_net = TCN(1, 1, cfg.hidden, cfg.n_blocks)
    opt_g = torch.optim.Adam(g_net.parameters(), lr=cfg.lr_g, betas=(0.5, 0.9))
    opt_d = torch.optim.Adam(d_net.parameters(), lr=cfg.lr_d, betas=(0.5, 0.9))
    bce = nn.BCEWithLogitsLoss()

    def checkpoint(steps_done: int, losses: list) -> dict:
        return {
            "config": asdict(cfg),
            "frequency": frequency,
            "preprocess": pp.to_dict(),
            "generator": {k: v.clone() for k, v in g_net.state_dict().items()},
            "discriminator": {k: v.clone() for k, v in d_net.state_dict().items()},
            "steps_done": steps_done,
            "losses": losses,
        }

    last_good = checkpoint(0, [])
    losses: list[tuple[float, float]] = []
    for step in range(cfg.steps):
        real = _windows(data, cfg.window, cfg.batch_size, gen_rng)
        noise = torch.randn(cfg.batch_size, cfg.latent_dim, cfg.window,
                            generator=gen_rng)
        with torch.no_grad():
            fake = g_net(noise)
        d_loss = bce(d_net(real), torch.ones(cfg.batch_size, 1, cfg.window)) + \
            bce(d_net(fake), torch.zeros(cfg.batch_size, 1, cfg.window))
        opt_d.zero_grad()
        d_loss.backward()
        opt_d.step()

        noise = torch.randn(cfg.batch_size, cfg.latent_dim, cfg.window,
                            generator=gen_rng)
        fake = g_net(noise)
        g_loss = bce(d_net(fake), torch.ones(cfg.batch_size, 1, cfg.window))
        opt_g.zero_grad()
        g_loss.backward()
        opt_g.step()

        dl, gl = float(d_loss.detach()), float(g_loss.detach())
        losses.append((dl, gl))
        if not (np.isfinite(dl) and np.isfinite(gl)):
            log.warning("divergence at step %d; keeping last good checkpoint", step)
            return last_good
        if (step + 1) % 50 == 0:
            last_good = checkpoint(step + 1, list(losses))
            log.info("step %d: d_loss %.3f g_loss %.3f", step + 1, dl, gl)

    return checkpoint(cfg.steps, losses)


def save_checkpoint(ckpt: dict, path) -> Path:
    path = Path(path)
    torch.save(ckpt, path)
    return path


def load_checkpoint(path) -> dict:
    return torch.load(path, map_location="cpu", weights_only=False)


def parameter_digest(ckpt: dict) -> str:
    """Stable hash of the generator parameters (determinism checks)."""
    import hashlib

    h = hashlib.sha256()
    for key in sorted(ckpt["generator"]):
        h.update(key.encode())
        h.update(ckpt["generator"][key].numpy().tobytes())
    return h.hexdigest()
