"""Speech decoder: style + frame-level content representations -> log-mel frames."""
from __future__ import annotations

import torch
import torch.nn as nn

from prompttts.nn import TransformerStack, lengths_to_mask


class SpecDecoder(nn.Module):
    """The style vector is broadcast over frames, concatenated channel-wise with
    the content representation, projected back to the model width, and passed
    through style-prepended blocks before the mel projection."""

    def __init__(self, width: int = 256, n_layers: int = 4, heads: int = 2,
                 ffn: int = 512, n_mels: int = 80):
        super().__init__()
        self.width = width
        self.n_mels = n_mels
        self.input_proj = nn.Linear(2 * width, width)
        self.stack = TransformerStack(n_layers, width, heads, ffn)
        self.mel_proj = nn.Linear(width, n_mels)

    def forward(self, content: torch.Tensor, style: torch.Tensor, lengths=None):
        if content.shape[1] == 0:
            raise ValueError("empty content representation")
        if content.shape[-1] != self.width or style.shape[-1] != self.width:
            raise ValueError(
                f"width mismatch: content {content.shape[-1]}, style {style.shape[-1]}, "
                f"decoder {self.width}")
        b, frames, _ = content.shape
        mask = lengths_to_mask(lengths, frames) if lengths is not None else None
        broadcast = style.unsqueeze(1).expand(b, frames, self.width)
        x = self.input_proj(torch.cat([content, broadcast], dim=-1))
        x = self.stack.add_positions(x, offset=1)
        x = self.stack(x, mask=mask, style=style)
        return self.mel_proj(x)


def mel_loss(pred: torch.Tensor, target: torch.Tensor,
             mask: torch.Tensor | None = None) -> torch.Tensor:
    """Mean absolute error over unmasked frames and bins."""
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {tuple(pred.shape)} vs {tuple(target.shape)}")
    err = (pred - target).abs()
    if mask is None:
        return err.mean()
    m = mask.to(pred.dtype).unsqueeze(-1)
    count = torch.clamp(m.sum() * pred.shape[-1], min=1.0)
    return (err * m).sum() / count
