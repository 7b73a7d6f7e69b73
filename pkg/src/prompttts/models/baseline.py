"""Two-stage baseline: explicit factor classification, then factor-embedding synthesis."""
from __future__ import annotations

import json
from pathlib import Path

import torch
import torch.nn as nn

from prompttts.factors import FACTOR_CATEGORIES, StyleFactors
from prompttts.models.content_encoder import ContentEncoder
from prompttts.models.decoder import SpecDecoder
from prompttts.models.style_encoder import StyleEncoder
from prompttts.nn import load_checkpoint, save_checkpoint

CONFIG_NAME = "baseline.json"
WEIGHTS_NAME = "baseline.ckpt"


class FactorEmbedding(nn.Module):
    """One learned vector per category of each factor; a tuple embeds as their sum."""

    def __init__(self, width: int = 256, with_emotion: bool = True):
        super().__init__()
        names = list(FACTOR_CATEGORIES) if with_emotion else list(FACTOR_CATEGORIES)[:-1]
        self.tables = nn.ModuleDict({
            name: nn.Embedding(len(FACTOR_CATEGORIES[name]), width) for name in names
        })

    def forward(self, label_ids: dict[str, torch.Tensor]) -> torch.Tensor:
        total = None
        for name, table in self.tables.items():
            term = table(label_ids[name])
            total = term if total is None else total + term
        return total

    def embed_factors(self, factors: list[StyleFactors]) -> torch.Tensor:
        ids = {
            name: torch.tensor([FACTOR_CATEGORIES[name].index(getattr(f, name))
                                for f in factors], dtype=torch.long)
            for name in self.tables
        }
        return self.forward(ids)


class TwoStageModel(nn.Module):
    """Stage 1 classifies factors from the prompt; stage 2 synthesizes from an
    embedding of those factors through its own content encoder and decoder."""

    def __init__(self, vocab_size: int, phoneme_count: int, width: int = 256,
                 n_layers: int = 4, heads: int = 2, ffn: int = 512,
                 prefix_len: int = 8, n_bins: int = 32, with_emotion: bool = True,
                 tuning_mode: str = "ptuning_v2"):
        super().__init__()
        self.config = dict(vocab_size=vocab_size, phoneme_count=phoneme_count,
                           width=width, n_layers=n_layers, heads=heads, ffn=ffn,
                           prefix_len=prefix_len, n_bins=n_bins,
                           with_emotion=with_emotion, tuning_mode=tuning_mode)
        self.stage1 = StyleEncoder(vocab_size, width, n_layers, heads, ffn,
                                   prefix_len, with_emotion=with_emotion,
                                   tuning_mode=tuning_mode)
        self.factor_embedding = FactorEmbedding(width, with_emotion)
        self.content_encoder = ContentEncoder(phoneme_count, width, n_layers, heads,
                                              ffn, n_bins)
        self.decoder = SpecDecoder(width, n_layers, heads, ffn)

    def stage2_forward(self, label_ids: dict[str, torch.Tensor], phoneme_ids,
                       phoneme_lengths, teacher: dict | None = None):
        style = self.factor_embedding(label_ids)
        frames, frame_lengths, var_pred, durations = self.content_encoder(
            phoneme_ids, style, phoneme_lengths, teacher)
        mel = self.decoder(frames, style, frame_lengths)
        return {"mel": mel, "frame_lengths": frame_lengths, "variance": var_pred,
                "durations": durations}

    @torch.no_grad()
    def synthesize_mel_from_factors(self, factors: StyleFactors, phoneme_ids):
        self.eval()
        style = self.factor_embedding.embed_factors([factors])
        frames, frame_lengths, _, _ = self.content_encoder(
            phoneme_ids, style, None, None)
        return self.decoder(frames, style, frame_lengths)[0]

    @torch.no_grad()
    def classify_prompt(self, token_ids) -> StyleFactors:
        return self.stage1.classify_factors(token_ids)[0]

    def save(self, run_dir) -> None:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / CONFIG_NAME).write_text(
            json.dumps(self.config, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        save_checkpoint(run_dir / WEIGHTS_NAME, dict(self.state_dict()))

    @classmethod
    def load(cls, run_dir) -> "TwoStageModel":
        run_dir = Path(run_dir)
        config = json.loads((run_dir / CONFIG_NAME).read_text(encoding="utf-8"))
        model = cls(**config)
        model.load_state_dict(load_checkpoint(run_dir / WEIGHTS_NAME))
        model.stage1.set_tuning_mode(config["tuning_mode"])
        model.eval()
        return model
