"""Transformer blocks with masking, style-prepend, and deep-prefix attention."""
from __future__ import annotations

import math

import torch
import torch.nn as nn

NEG_INF = -1e9


def sinusoid_table(n_positions: int, width: int) -> torch.Tensor:
    """Classic sinusoidal position encodings, shape (n_positions, width)."""
    position = torch.arange(n_positions, dtype=torch.float32).unsqueeze(1)
    div = torch.exp(torch.arange(0, width, 2, dtype=torch.float32)
                    * (-math.log(10000.0) / width))
    table = torch.zeros(n_positions, width)
    table[:, 0::2] = torch.sin(position * div)
    table[:, 1::2] = torch.cos(position * div)
    return table


def lengths_to_mask(lengths, max_len: int | None = None) -> torch.Tensor:
    """Boolean mask (batch, max_len); True marks real positions."""
    lengths = torch.as_tensor(lengths, dtype=torch.long)
    max_len = max_len or int(lengths.max())
    return torch.arange(max_len, device=lengths.device)[None, :] < lengths[:, None]


def prepend_style(x: torch.Tensor, s: torch.Tensor) -> torch.Tensor:
    """Insert the style vector at position 0 of every sequence in the batch."""
    if x.shape[-1] != s.shape[-1]:
        raise ValueError(f"width mismatch: sequence {x.shape[-1]} vs style {s.shape[-1]}")
    return torch.cat([s.unsqueeze(1), x], dim=1)


class DeepPrefix(nn.Module):
    """Per-layer learnable attention key/value prefixes (no reparameterization)."""

    def __init__(self, n_layers: int, width: int, heads: int, length: int = 8):
        super().__init__()
        if width % heads:
            raise ValueError(f"width {width} not divisible by heads {heads}")
        self.length = length
        head_dim = width // heads
        self.keys = nn.ParameterList(
            nn.Parameter(torch.randn(heads, length, head_dim) * 0.02)
            for _ in range(n_layers))
        self.values = nn.ParameterList(
            nn.Parameter(torch.randn(heads, length, head_dim) * 0.02)
            for _ in range(n_layers))

    def layer(self, idx: int) -> tuple[torch.Tensor, torch.Tensor]:
        return self.keys[idx], self.values[idx]


class SelfAttention(nn.Module):
    def __init__(self, width: int, heads: int):
        super().__init__()
        if width % heads:
            raise ValueError(f"width {width} not divisible by heads {heads}")
        self.width = width
        self.heads = heads
        self.head_dim = width // heads
        self.q = nn.Linear(width, width)
        self.k = nn.Linear(width, width)
        self.v = nn.Linear(width, width)
        self.out = nn.Linear(width, width)

    def forward(self, x, mask=None, prefix=None):
        b, length, _ = x.shape
        q = self.q(x).view(b, length, self.heads, self.head_dim).transpose(1, 2)
        k = self.k(x).view(b, length, self.heads, self.head_dim).transpose(1, 2)
        v = self.v(x).view(b, length, self.heads, self.head_dim).transpose(1, 2)

        if prefix is not None:
            pk, pv = prefix
            pk = pk.to(x.dtype).unsqueeze(0).expand(b, -1, -1, -1)
            pv = pv.to(x.dtype).unsqueeze(0).expand(b, -1, -1, -1)
            k = torch.cat([pk, k], dim=2)
            v = torch.cat([pv, v], dim=2)

        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        if mask is not None:
            key_mask = mask
            if prefix is not None:
                pad = torch.ones(b, prefix[0].shape[1], dtype=torch.bool, device=x.device)
                key_mask = torch.cat([pad, mask], dim=1)
            scores = scores.masked_fill(~key_mask[:, None, None, :], NEG_INF)
        attn = torch.softmax(scores, dim=-1)
        mixed = (attn @ v).transpose(1, 2).reshape(b, length, self.width)
        return self.out(mixed)


class FeedForward(nn.Module):
    def __init__(self, width: int, hidden: int):
        super().__init__()
        self.lin1 = nn.Linear(width, hidden)
        self.lin2 = nn.Linear(hidden, width)

    def forward(self, x):
        return self.lin2(torch.relu(self.lin1(x)))


class TransformerBlock(nn.Module):
    """Post-norm self-attention + feed-forward with residuals.

    Output length equals input length; a supplied prefix extends the
    attention keys/values by its length without changing the output shape.
    Padded positions are zeroed so they cannot leak into pooled statistics.
    """

    def __init__(self, width: int, heads: int = 2, ffn: int = 512):
        super().__init__()
        self.width = width
        self.attn = SelfAttention(width, heads)
        self.ff = FeedForward(width, ffn)
        self.norm1 = nn.LayerNorm(width)
        self.norm2 = nn.LayerNorm(width)

    def forward(self, x, mask=None, prefix=None):
        if x.shape[-1] != self.width:
            raise ValueError(f"width mismatch: input {x.shape[-1]} vs block {self.width}")
        x = self.norm1(x + self.attn(x, mask=mask, prefix=prefix))
        x = self.norm2(x + self.ff(x))
        if mask is not None:
            x = x * mask.unsqueeze(-1).to(x.dtype)
        return x


class TransformerStack(nn.Module):
    """A stack of blocks with optional per-block style prepending.

    When a style vector is supplied it is prepended before every block (with
    position index 0; content occupies positions 1..L) and stripped again
    after, so each block sees the same untransformed style vector.
    """

    def __init__(self, n_layers: int, width: int, heads: int = 2, ffn: int = 512,
                 max_len: int = 2048):
        super().__init__()
        self.width = width
        self.n_layers = n_layers
        self.blocks = nn.ModuleList(
            TransformerBlock(width, heads, ffn) for _ in range(n_layers))
        self.register_buffer("pos_table", sinusoid_table(max_len + 1, width),
                             persistent=False)

    def add_positions(self, x: torch.Tensor, offset: int = 1) -> torch.Tensor:
        """Add sinusoidal positions starting at ``offset`` (0 is the style slot)."""
        length = x.shape[1]
        return x + self.pos_table[offset:offset + length].to(x.dtype)

    def forward(self, x, mask=None, style=None, prefix: DeepPrefix | None = None):
        b = x.shape[0]
        for i, block in enumerate(self.blocks):
            layer_prefix = prefix.layer(i) if prefix is not None else None
            if style is not None:
                pos0 = self.pos_table[0].to(x.dtype)
                x = prepend_style(x, style + pos0)
                block_mask = None
                if mask is not None:
                    ones = torch.ones(b, 1, dtype=torch.bool, device=x.device)
                    block_mask = torch.cat([ones, mask], dim=1)
                x = block(x, mask=block_mask, prefix=layer_prefix)
                x = x[:, 1:]
            else:
                x = block(x, mask=mask, prefix=layer_prefix)
        return x
