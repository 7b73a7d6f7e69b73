"""Training loops for the acoustic model, the two-stage baseline, and the classifiers."""
from __future__ import annotations

import copy
import json
from pathlib import Path

import numpy as np
import torch

from prompttts.corpus import load_manifest
from prompttts.dsp import mel_from_wave
from prompttts.models import (
    MelFactorClassifier,
    PromptTTSModel,
    TwoStageModel,
    auxiliary_loss,
    mel_loss,
    variance_loss,
)
from prompttts.models.content_encoder import VariancePrediction
from prompttts.nn import lengths_to_mask
from prompttts.textfront import PHONEMES, Lexicon, Vocabulary
from prompttts.training.config import TrainConfig
from prompttts.training.data import BatchIterator, bucket_ranges, prepare_records

CURVES_NAME = "curves.txt"


def _schedule_factor(step: int, config: TrainConfig) -> float:
    step = max(step, 1)
    if step < config.warmup:
        return step / config.warmup
    return (config.warmup / step) ** 0.5


def _set_lr(opt, step: int, config: TrainConfig) -> None:
    factor = _schedule_factor(step, config)
    for group in opt.param_groups:
        group["lr"] = group["base_lr"] * factor


def _style_adapter_groups(style_encoder, other_params, config: TrainConfig):
    """Optimizer groups: prefix + classification heads at the adapter rate,
    everything else at the base rate."""
    adapter, base = [], list(other_params)
    adapter_ids = {id(p) for p in style_encoder.prefix.parameters()}
    adapter_ids |= {id(p) for p in style_encoder.heads.parameters()}
    for p in style_encoder.parameters():
        if not p.requires_grad:
            continue
        (adapter if id(p) in adapter_ids else base).append(p)
    groups = []
    if base:
        groups.append({"params": base, "lr": config.lr, "base_lr": config.lr})
    if adapter:
        rate = config.lr * config.adapter_lr_multiplier
        groups.append({"params": adapter, "lr": rate, "base_lr": rate})
    return groups


class _CurveWriter:
    def __init__(self, path: Path, columns: list[str]):
        self.path = path
        path.parent.mkdir(parents=True, exist_ok=True)
        self.file = open(path, "w", encoding="utf-8")
        self.file.write("# step\t" + "\t".join(columns) + "\n")

    def add(self, step: int, values: list[float]) -> None:
        self.file.write(f"{step}\t" + "\t".join(f"{v:.6f}" for v in values) + "\n")

    def close(self) -> None:
        self.file.close()


def _teacher(batch):
    return {"durations": batch["durations"], "pitch": batch["pitch"],
            "energy": batch["energy"]}


def train_prompttts(config: TrainConfig) -> Path:
    """Joint optimization of mel, variance, and auxiliary classification losses."""
    torch.manual_seed(config.seed)
    run_dir = Path(config.run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    config.to_yaml(run_dir / "config.yaml")

    manifest = load_manifest(config.corpus_dir)
    vocab = Vocabulary.load()
    lexicon = Lexicon.load()
    records = prepare_records(manifest, vocab, lexicon, "train")
    with_emotion = manifest.version != "real_style"

    model = PromptTTSModel(
        vocab_size=len(vocab), phoneme_count=len(PHONEMES), width=config.width,
        n_layers=config.n_layers, heads=config.heads, ffn=config.ffn,
        prefix_len=config.prefix_len, n_bins=config.n_bins,
        with_emotion=with_emotion, tuning_mode=config.tuning_mode)
    model.content_encoder.set_bucket_ranges(*bucket_ranges(records))

    other = [p for name, p in model.named_parameters()
             if p.requires_grad and not name.startswith("style_encoder.")]
    opt = torch.optim.Adam(_style_adapter_groups(model.style_encoder, other, config))
    batches = iter(BatchIterator(records, config.batch_size, config.seed))
    curves = _CurveWriter(run_dir / CURVES_NAME, ["total", "mel", "variance", "aux"])

    last_good = copy.deepcopy(model.state_dict())
    initial = None
    smoothed = None
    try:
        for step in range(1, config.steps + 1):
            batch = next(batches)
            _set_lr(opt, step, config)
            opt.zero_grad()
            out = model(batch["tokens"], batch["token_lengths"],
                        batch["phonemes"], batch["phoneme_lengths"],
                        teacher=_teacher(batch))
            frame_mask = lengths_to_mask(batch["frame_lengths"])
            phon_mask = lengths_to_mask(batch["phoneme_lengths"])
            log_dur_target = torch.log(batch["durations"].clamp(min=1).float()) \
                * phon_mask.float()
            target = VariancePrediction(log_dur_target, batch["pitch"], batch["energy"])
            l_mel = mel_loss(out["mel"], batch["mels"], frame_mask)
            weighted_var = variance_loss(
                out["variance"], target, phon_mask,
                weights=(config.duration_weight, config.pitch_weight,
                         config.energy_weight))
            l_aux = auxiliary_loss(out["logits"], batch["labels"])
            total = config.mel_weight * l_mel + weighted_var + config.aux_weight * l_aux
            if not torch.isfinite(total):
                model.load_state_dict(last_good)
                model.save(run_dir)
                raise RuntimeError(f"training diverged at step {step}; "
                                   "last good checkpoint saved")
            total.backward()
            opt.step()

            value = float(total.detach())
            smoothed = value if smoothed is None else 0.98 * smoothed + 0.02 * value
            if initial is None:
                initial = smoothed
            curves.add(step, [value, float(l_mel.detach()),
                              float(weighted_var.detach()), float(l_aux.detach())])
            if step % config.checkpoint_every == 0:
                last_good = copy.deepcopy(model.state_dict())
                model.save(run_dir)
    finally:
        curves.close()

    model.style_encoder.mark_trained()
    model.save(run_dir)
    summary = {"initial_smoothed_loss": initial, "final_smoothed_loss": smoothed,
               "steps": config.steps}
    (run_dir / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return run_dir


def train_baseline(config: TrainConfig) -> Path:
    """Stage 1 (prompt -> factors) and stage 2 (factors -> mel), trained separately."""
    torch.manual_seed(config.seed)
    run_dir = Path(config.run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    config.to_yaml(run_dir / "config.yaml")

    manifest = load_manifest(config.corpus_dir)
    vocab = Vocabulary.load()
    lexicon = Lexicon.load()
    records = prepare_records(manifest, vocab, lexicon, "train")
    with_emotion = manifest.version != "real_style"

    model = TwoStageModel(
        vocab_size=len(vocab), phoneme_count=len(PHONEMES), width=config.width,
        n_layers=config.n_layers, heads=config.heads, ffn=config.ffn,
        prefix_len=config.prefix_len, n_bins=config.n_bins,
        with_emotion=with_emotion, tuning_mode=config.tuning_mode)
    model.content_encoder.set_bucket_ranges(*bucket_ranges(records))

    curves = _CurveWriter(run_dir / CURVES_NAME, ["stage", "loss"])
    batches = iter(BatchIterator(records, config.batch_size, config.seed))

    # Stage 1: explicit factor classification from the style prompt.
    opt1 = torch.optim.Adam(_style_adapter_groups(model.stage1, [], config))
    for step in range(1, config.stage1_steps + 1):
        batch = next(batches)
        _set_lr(opt1, step, config)
        opt1.zero_grad()
        _, logits = model.stage1(batch["tokens"], batch["token_lengths"])
        loss = auxiliary_loss(logits, batch["labels"])
        if not torch.isfinite(loss):
            raise RuntimeError(f"stage-1 training diverged at step {step}")
        loss.backward()
        opt1.step()
        curves.add(step, [1.0, float(loss.detach())])
    model.stage1.mark_trained()

    # Stage 2: synthesis conditioned on ground-truth factor embeddings.
    stage2_params = (list(model.factor_embedding.parameters())
                     + list(model.content_encoder.parameters())
                     + list(model.decoder.parameters()))
    opt2 = torch.optim.Adam([{"params": stage2_params, "lr": config.lr,
                              "base_lr": config.lr}])
    for step in range(1, config.steps + 1):
        batch = next(batches)
        _set_lr(opt2, step, config)
        opt2.zero_grad()
        out = model.stage2_forward(batch["labels"], batch["phonemes"],
                                   batch["phoneme_lengths"], teacher=_teacher(batch))
        frame_mask = lengths_to_mask(batch["frame_lengths"])
        phon_mask = lengths_to_mask(batch["phoneme_lengths"])
        log_dur_target = torch.log(batch["durations"].clamp(min=1).float()) \
            * phon_mask.float()
        target = VariancePrediction(log_dur_target, batch["pitch"], batch["energy"])
        loss = (config.mel_weight * mel_loss(out["mel"], batch["mels"], frame_mask)
                + variance_loss(out["variance"], target, phon_mask))
        if not torch.isfinite(loss):
            raise RuntimeError(f"stage-2 training diverged at step {step}")
        loss.backward()
        opt2.step()
        curves.add(step, [2.0, float(loss.detach())])
    curves.close()

    model.save(run_dir)
    return run_dir


def train_classifiers(config: TrainConfig) -> Path:
    """Gender (and, for 5-factor corpora, emotion) classifiers over mel input."""
    run_dir = Path(config.run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    manifest = load_manifest(config.corpus_dir)
    with_emotion = manifest.version != "real_style"

    def mels_and_labels(split):
        mels, labels = [], []
        for record in manifest.split(split):
            mels.append(mel_from_wave(manifest.load_audio(record)))
            labels.append(record.factors)
        return mels, labels

    train_mels, train_factors = mels_and_labels("train")
    test_mels, test_factors = mels_and_labels("test")

    accuracies = {}
    factors = ["gender"] + (["emotion"] if with_emotion else [])
    for name in factors:
        clf = MelFactorClassifier(factor=name, epochs=config.classifier_epochs,
                                  seed=config.seed)
        clf.fit(train_mels, [getattr(f, name) for f in train_factors])
        held_out = clf.score(test_mels, [getattr(f, name) for f in test_factors])
        accuracies[name] = round(100.0 * held_out, 2)
        clf.save(run_dir / name)
    (run_dir / "accuracy.json").write_text(
        json.dumps({"version": manifest.version, "held_out_percent": accuracies},
                   sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return run_dir
