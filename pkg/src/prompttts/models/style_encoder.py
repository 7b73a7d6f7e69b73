"""Style encoder: tokens -> [CLS]-pooled style representation + factor logits."""
from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from prompttts.factors import FACTOR_CATEGORIES, StyleFactors
from prompttts.nn import DeepPrefix, TransformerStack, lengths_to_mask

TUNING_MODES = ("ptuning_v2", "standard", "frozen")


class StyleEncoder(nn.Module):
    """Transformer encoder over style-prompt tokens.

    The hidden state at the [CLS] position (index 0) is projected to the
    style representation; per-factor linear heads classify the same state.
    The tuning mode decides which parameter groups may update: "standard"
    trains everything, "ptuning_v2" trains only the per-layer key/value
    prefixes plus the heads, "frozen" trains only the heads.
    """

    def __init__(self, vocab_size: int, width: int = 256, n_layers: int = 4,
                 heads: int = 2, ffn: int = 512, prefix_len: int = 8,
                 with_emotion: bool = True, tuning_mode: str = "standard"):
        super().__init__()
        self.vocab_size = vocab_size
        self.width = width
        self.with_emotion = with_emotion
        self.embedding = nn.Embedding(vocab_size, width)
        self.stack = TransformerStack(n_layers, width, heads, ffn)
        self.prefix = DeepPrefix(n_layers, width, heads, prefix_len)
        self.style_proj = nn.Linear(width, width)
        factor_names = list(FACTOR_CATEGORIES) if with_emotion else list(FACTOR_CATEGORIES)[:-1]
        self.heads = nn.ModuleDict({
            name: nn.Linear(width, len(FACTOR_CATEGORIES[name])) for name in factor_names
        })
        self.register_buffer("trained_flag", torch.zeros(1))
        self.set_tuning_mode(tuning_mode)

    # -- tuning-mode contracts -------------------------------------------------
    def backbone_parameters(self):
        yield from self.embedding.parameters()
        yield from self.stack.parameters()
        yield from self.style_proj.parameters()

    def set_tuning_mode(self, mode: str) -> None:
        if mode not in TUNING_MODES:
            raise ValueError(f"unknown tuning mode {mode!r}; expected one of {TUNING_MODES}")
        self.tuning_mode = mode
        backbone_trainable = mode == "standard"
        for p in self.backbone_parameters():
            p.requires_grad_(backbone_trainable)
        for p in self.prefix.parameters():
            p.requires_grad_(mode == "ptuning_v2")
        for p in self.heads.parameters():
            p.requires_grad_(True)

    @property
    def uses_prefix(self) -> bool:
        return self.tuning_mode == "ptuning_v2"

    # -- forward ----------------------------------------------------------------
    def forward(self, token_ids: torch.Tensor, lengths=None):
        """(style_representation, factor_logits) for a batch of token ids."""
        if token_ids.max() >= self.vocab_size or token_ids.min() < 0:
            raise ValueError("token id out of vocabulary range")
        mask = None
        if lengths is not None:
            mask = lengths_to_mask(lengths, token_ids.shape[1])
        x = self.embedding(token_ids)
        x = self.stack.add_positions(x, offset=0)
        x = self.stack(x, mask=mask, prefix=self.prefix if self.uses_prefix else None)
        cls = x[:, 0]
        rep = self.style_proj(cls)
        logits = {name: head(cls) for name, head in self.heads.items()}
        return rep, logits

    def classify_factors(self, token_ids: torch.Tensor, lengths=None) -> list[StyleFactors]:
        if float(self.trained_flag) == 0.0:
            raise RuntimeError("style encoder has not been trained")
        with torch.no_grad():
            _, logits = self.forward(token_ids, lengths)
        out = []
        for i in range(token_ids.shape[0]):
            kwargs = {}
            for name, values in logits.items():
                idx = int(values[i].argmax())
                kwargs[name] = FACTOR_CATEGORIES[name][idx]
            if "emotion" not in kwargs:
                kwargs["emotion"] = None
            out.append(StyleFactors(**kwargs))
        return out

    def mark_trained(self) -> None:
        self.trained_flag.fill_(1.0)


def labels_to_ids(factors: list[StyleFactors], with_emotion: bool) -> dict[str, torch.Tensor]:
    names = list(FACTOR_CATEGORIES) if with_emotion else list(FACTOR_CATEGORIES)[:-1]
    out = {}
    for name in names:
        cats = FACTOR_CATEGORIES[name]
        out[name] = torch.tensor([cats.index(getattr(f, name)) for f in factors],
                                 dtype=torch.long)
    return out


def auxiliary_loss(logits: dict[str, torch.Tensor],
                   labels: dict[str, torch.Tensor]) -> torch.Tensor:
    """Sum of per-factor cross-entropy terms, equally weighted."""
    total = None
    for name in logits:
        if name not in labels:
            raise ValueError(f"missing label for enabled head {name!r}")
        term = F.cross_entropy(logits[name], labels[name])
        total = term if total is None else total + term
    if total is None:
        raise ValueError("no classification heads enabled")
    return total
