"""Content encoder: style-conditioned phoneme encoding, variance adaptor, length regulation."""
from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

from prompttts.nn import TransformerStack, lengths_to_mask


@dataclass
class VariancePrediction:
    """Per-phoneme predictions: log-scale durations, log-Hz pitch, linear energy."""

    log_duration: torch.Tensor
    pitch: torch.Tensor
    energy: torch.Tensor


def length_regulate(hidden: torch.Tensor, durations) -> torch.Tensor:
    """Repeat position i of (N, D) ``durations[i]`` times; zero durations drop out."""
    durations = torch.as_tensor(durations, dtype=torch.long)
    if (durations < 0).any():
        raise ValueError("negative duration")
    if hidden.shape[0] != durations.shape[0]:
        raise ValueError(f"length mismatch: {hidden.shape[0]} hidden vs "
                         f"{durations.shape[0]} durations")
    return torch.repeat_interleave(hidden, durations, dim=0)


class VariancePredictor(nn.Module):
    """Two-layer 1-D convolutional regressor emitting one value per position."""

    def __init__(self, width: int, hidden: int = 256, kernel: int = 3):
        super().__init__()
        pad = (kernel - 1) // 2
        self.conv1 = nn.Conv1d(width, hidden, kernel, padding=pad)
        self.conv2 = nn.Conv1d(hidden, hidden, kernel, padding=pad)
        self.norm1 = nn.LayerNorm(hidden)
        self.norm2 = nn.LayerNorm(hidden)
        self.out = nn.Linear(hidden, 1)

    def forward(self, x, mask=None):
        y = torch.relu(self.conv1(x.transpose(1, 2)).transpose(1, 2))
        y = self.norm1(y)
        y = torch.relu(self.conv2(y.transpose(1, 2)).transpose(1, 2))
        y = self.norm2(y)
        y = self.out(y).squeeze(-1)
        if mask is not None:
            y = y * mask.to(y.dtype)
        return y


class ContentEncoder(nn.Module):
    """Phoneme embedding -> style-prepended blocks -> variance adaptor -> frames."""

    def __init__(self, phoneme_count: int, width: int = 256, n_layers: int = 4,
                 heads: int = 2, ffn: int = 512, n_bins: int = 32):
        super().__init__()
        self.width = width
        self.n_bins = n_bins
        self.embedding = nn.Embedding(phoneme_count, width)
        self.stack = TransformerStack(n_layers, width, heads, ffn)
        # direct style conditioning into the variance adaptor: duration, pitch,
        # and energy are the style-dependent quantities, so the predictors see
        # the style vector without routing through the whole block stack
        self.style_cond = nn.Linear(width, width)
        self.duration_predictor = VariancePredictor(width)
        self.pitch_predictor = VariancePredictor(width)
        self.energy_predictor = VariancePredictor(width)
        self.pitch_embedding = nn.Embedding(n_bins, width)
        self.energy_embedding = nn.Embedding(n_bins, width)
        self.register_buffer("pitch_range", torch.tensor([0.0, 1.0]))
        self.register_buffer("energy_range", torch.tensor([0.0, 1.0]))

    def set_bucket_ranges(self, pitch_min, pitch_max, energy_min, energy_max) -> None:
        self.pitch_range.copy_(torch.tensor([float(pitch_min), float(pitch_max)]))
        self.energy_range.copy_(torch.tensor([float(energy_min), float(energy_max)]))

    def _bucketize(self, values: torch.Tensor, value_range: torch.Tensor) -> torch.Tensor:
        lo, hi = value_range[0], value_range[1]
        span = torch.clamp(hi - lo, min=1e-6)
        idx = torch.floor((values - lo) / span * self.n_bins)
        return idx.long().clamp(0, self.n_bins - 1)

    def forward(self, phoneme_ids: torch.Tensor, style: torch.Tensor,
                lengths=None, teacher: dict | None = None):
        """Returns (frame_hidden, frame_lengths, VariancePrediction, durations).

        Training passes teacher durations/pitch/energy; inference regulates
        with predicted durations rounded half-up, at least one frame each.
        """
        if phoneme_ids.numel() == 0 or phoneme_ids.shape[1] == 0:
            raise ValueError("empty phoneme sequence")
        if style.shape[-1] != self.width:
            raise ValueError(f"width mismatch: style {style.shape[-1]} vs {self.width}")
        b, n = phoneme_ids.shape
        mask = lengths_to_mask(lengths, n) if lengths is not None else \
            torch.ones(b, n, dtype=torch.bool)

        x = self.embedding(phoneme_ids)
        x = self.stack.add_positions(x, offset=1)
        x = self.stack(x, mask=mask, style=style)

        adaptor_in = x + self.style_cond(style).unsqueeze(1)
        log_dur = self.duration_predictor(adaptor_in, mask)
        pitch = self.pitch_predictor(adaptor_in, mask)
        energy = self.energy_predictor(adaptor_in, mask)
        prediction = VariancePrediction(log_dur, pitch, energy)

        pitch_src = teacher["pitch"] if teacher is not None else pitch.detach()
        energy_src = teacher["energy"] if teacher is not None else energy.detach()
        x = x + self.pitch_embedding(self._bucketize(pitch_src, self.pitch_range))
        x = x + self.energy_embedding(self._bucketize(energy_src, self.energy_range))
        if teacher is not None:
            durations = teacher["durations"].long()
        else:
            durations = torch.floor(torch.exp(log_dur.detach()) + 0.5).long().clamp(min=1)
        durations = durations * mask.long()

        frames = []
        for i in range(b):
            frames.append(length_regulate(x[i], durations[i]))
        frame_lengths = torch.tensor([f.shape[0] for f in frames], dtype=torch.long)
        if int(frame_lengths.max()) == 0:
            raise ValueError("degenerate utterance: zero total duration")
        padded = torch.zeros(b, int(frame_lengths.max()), self.width, dtype=x.dtype)
        for i, f in enumerate(frames):
            padded[i, :f.shape[0]] = f
        return padded, frame_lengths, prediction, durations


def masked_mse(pred: torch.Tensor, target: torch.Tensor,
               mask: torch.Tensor) -> torch.Tensor:
    if pred.shape != target.shape:
        raise ValueError(f"length mismatch: {tuple(pred.shape)} vs {tuple(target.shape)}")
    m = mask.to(pred.dtype)
    count = torch.clamp(m.sum(), min=1.0)
    return (((pred - target) ** 2) * m).sum() / count


def variance_loss(pred: VariancePrediction, target: VariancePrediction,
                  mask: torch.Tensor, weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
                  ) -> torch.Tensor:
    """Masked MSE summed over the duration, pitch, and energy streams."""
    w_dur, w_pitch, w_energy = weights
    return (w_dur * masked_mse(pred.log_duration, target.log_duration, mask)
            + w_pitch * masked_mse(pred.pitch, target.pitch, mask)
            + w_energy * masked_mse(pred.energy, target.energy, mask))
