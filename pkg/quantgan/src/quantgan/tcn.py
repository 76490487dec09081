"""Temporal convolutional networks for the generator and discriminator.

Stacked causal conv blocks with doubling dilations and residual
connections; with kernel size 2 and six blocks the receptive field is
1 + 2 * (1 + 2 + ... + 32) = 127 steps.
"""

from __future__ import annotations

import torch
from torch import nn


class CausalConv1d(nn.Module):
    def __init__(self, in_ch: int, out_ch: int, dilation: int, kernel_size: int = 2):
        super().__init__()
        self.pad = (kernel_size - 1) * dilation
        self.conv = nn.Conv1d(in_ch, out_ch, kernel_size, dilation=dilation)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.conv(nn.functional.pad(x, (self.pad, 0)))


class TemporalBlock(nn.Module):
    def __init__(self, in_ch: int, hidden: int, dilation: int):
        super().__init__()
        self.conv1 = CausalConv1d(in_ch, hidden, dilation)
        self.conv2 = CausalConv1d(hidden, hidden, dilation)
        self.act = nn.PReLU(hidden)
        self.act2 = nn.PReLU(hidden)
        self.skip = nn.Conv1d(in_ch, hidden, 1) if in_ch != hidden else nn.Identity()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.act(self.conv1(x))
        h = self.act2(self.conv2(h))
        return h + self.skip(x)


class TCN(nn.Module):
    """Sequence-to-sequence causal network: (B, in_ch, T) -> (B, out_ch, T)."""

    def __init__(self, in_ch: int, out_ch: int, hidden: int = 40, n_blocks: int = 6):
        super().__init__()
        blocks = []
        ch = in_ch
        for i in range(n_blocks):
            blocks.append(TemporalBlock(ch, hidden, dilation=2**i))
            ch = hidden
        self.blocks = nn.Sequential(*blocks)
        self.head = nn.Conv1d(hidden, out_ch, 1)

    @staticmethod
    def receptive_field(n_blocks: int = 6, kernel_size: int = 2) -> int:
        return 1 + 2 * (kernel_size - 1) * (2**n_blocks - 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.blocks(x))
