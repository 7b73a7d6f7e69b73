"""End-to-end acoustic model: style encoder + content encoder + speech decoder."""
from __future__ import annotations

import json
from pathlib import Path

import torch
import torch.nn as nn

from prompttts.factors import StyleFactors
from prompttts.models.content_encoder import ContentEncoder
from prompttts.models.decoder import SpecDecoder
from prompttts.models.style_encoder import StyleEncoder
from prompttts.nn import load_checkpoint, save_checkpoint

CONFIG_NAME = "model.json"
WEIGHTS_NAME = "model.ckpt"


class PromptTTSModel(nn.Module):
    def __init__(self, vocab_size: int, phoneme_count: int, width: int = 256,
                 n_layers: int = 4, heads: int = 2, ffn: int = 512,
                 prefix_len: int = 8, n_bins: int = 32, with_emotion: bool = True,
                 tuning_mode: str = "ptuning_v2"):
        super().__init__()
        self.config = dict(vocab_size=vocab_size, phoneme_count=phoneme_count,
                           width=width, n_layers=n_layers, heads=heads, ffn=ffn,
                           prefix_len=prefix_len, n_bins=n_bins,
                           with_emotion=with_emotion, tuning_mode=tuning_mode)
        self.style_encoder = StyleEncoder(
            vocab_size, width, n_layers, heads, ffn, prefix_len,
            with_emotion=with_emotion, tuning_mode=tuning_mode)
        self.content_encoder = ContentEncoder(
            phoneme_count, width, n_layers, heads, ffn, n_bins)
        self.decoder = SpecDecoder(width, n_layers, heads, ffn)

    def forward(self, token_ids, token_lengths, phoneme_ids, phoneme_lengths,
                teacher: dict | None = None):
        style, logits = self.style_encoder(token_ids, token_lengths)
        frames, frame_lengths, var_pred, durations = self.content_encoder(
            phoneme_ids, style, phoneme_lengths, teacher)
        mel = self.decoder(frames, style, frame_lengths)
        return {
            "mel": mel,
            "frame_lengths": frame_lengths,
            "variance": var_pred,
            "logits": logits,
            "style": style,
            "durations": durations,
        }

    @torch.no_grad()
    def synthesize_mel(self, token_ids, phoneme_ids):
        """Inference for a single utterance; returns (mel, predicted_factors)."""
        self.eval()
        out = self.forward(token_ids, None, phoneme_ids, None, teacher=None)
        idx_factors = {}
        from prompttts.factors import FACTOR_CATEGORIES
        for name, values in out["logits"].items():
            idx_factors[name] = FACTOR_CATEGORIES[name][int(values[0].argmax())]
        if "emotion" not in idx_factors:
            idx_factors["emotion"] = None
        return out["mel"][0], StyleFactors(**idx_factors)

    def save(self, run_dir) -> None:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / CONFIG_NAME).write_text(
            json.dumps(self.config, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        save_checkpoint(run_dir / WEIGHTS_NAME, dict(self.state_dict()))

    @classmethod
    def load(cls, run_dir) -> "PromptTTSModel":
        run_dir = Path(run_dir)
        config = json.loads((run_dir / CONFIG_NAME).read_text(encoding="utf-8"))
        model = cls(**config)
        state = load_checkpoint(run_dir / WEIGHTS_NAME)
        model.load_state_dict(state)
        model.style_encoder.set_tuning_mode(config["tuning_mode"])
        model.eval()
        return model
