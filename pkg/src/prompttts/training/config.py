"""Run configuration, loadable from YAML with per-field CLI overrides."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import yaml


@dataclass
class TrainConfig:
    corpus_dir: str = "corpus"
    run_dir: str = "runs/prompttts"
    # model dims
    width: int = 256
    n_layers: int = 4
    heads: int = 2
    ffn: int = 512
    prefix_len: int = 8
    n_bins: int = 32
    tuning_mode: str = "ptuning_v2"
    # optimization
    steps: int = 2000
    stage1_steps: int = 800
    batch_size: int = 8
    lr: float = 1e-3
    # prefix/head parameters converge far faster with a larger step size,
    # the usual prefix-tuning convention
    adapter_lr_multiplier: float = 10.0
    warmup: int = 200
    seed: int = 0
    checkpoint_every: int = 500
    # loss weights
    mel_weight: float = 1.0
    duration_weight: float = 1.0
    pitch_weight: float = 1.0
    energy_weight: float = 1.0
    aux_weight: float = 1.0
    # classifier training
    classifier_epochs: int = 30

    def __post_init__(self):
        for name in ("mel_weight", "duration_weight", "pitch_weight",
                     "energy_weight", "aux_weight"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def to_yaml(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(yaml.safe_dump(asdict(self), sort_keys=True), encoding="utf-8")

    @classmethod
    def from_yaml(cls, path) -> "TrainConfig":
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        return cls(**raw)

    def with_overrides(self, **kwargs) -> "TrainConfig":
        known = {f.name: f.type for f in fields(self)}
        merged = asdict(self)
        for key, value in kwargs.items():
            if value is None:
                continue
            if key not in known:
                raise ValueError(f"unknown config field {key!r}")
            merged[key] = value
        return TrainConfig(**merged)
