"""Per-record feature preparation and deterministic batch assembly."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from prompttts.corpus import DatasetManifest, PromptRecord
from prompttts.dsp import HOP_LENGTH, f0_track, mel_from_wave
from prompttts.factors import FACTOR_CATEGORIES
from prompttts.textfront import Lexicon, Vocabulary, g2p, tokenize_prompt


@dataclass
class EncodedRecord:
    id: str
    token_ids: np.ndarray
    phoneme_ids: np.ndarray
    durations: np.ndarray     # teacher frames per phoneme, sums to n_frames
    pitch: np.ndarray         # per-phoneme mean log-F0 (0 where unvoiced)
    energy: np.ndarray        # per-phoneme mean frame RMS
    mel: np.ndarray           # (n_frames, 80)
    label_ids: dict[str, int]
    record: PromptRecord

    @property
    def n_frames(self) -> int:
        return self.mel.shape[0]


def largest_remainder(total: int, n: int) -> np.ndarray:
    """Split ``total`` into n near-equal integer parts preserving the sum."""
    quota = total / n
    base = np.full(n, int(quota), dtype=np.int64)
    rem = total - int(base.sum())
    base[:rem] += 1
    return base


def frame_rms(wave: np.ndarray, n_frames: int) -> np.ndarray:
    """Hop-local RMS aligned with mel frames."""
    out = np.zeros(n_frames)
    for k in range(n_frames):
        seg = wave[k * HOP_LENGTH:(k + 1) * HOP_LENGTH]
        if seg.size:
            out[k] = np.sqrt(np.mean(seg ** 2))
    return out


def phoneme_targets(wave: np.ndarray, n_phonemes: int, n_frames: int):
    """(durations, log_pitch, energy) per phoneme from the training audio."""
    durations = largest_remainder(n_frames, n_phonemes)
    track = f0_track(wave)
    track = track[:n_frames] if track.shape[0] >= n_frames else np.pad(
        track, (0, n_frames - track.shape[0]), constant_values=np.nan)
    rms = frame_rms(wave, n_frames)

    pitch = np.zeros(n_phonemes)
    energy = np.zeros(n_phonemes)
    start = 0
    for i, d in enumerate(durations):
        seg_f0 = track[start:start + d]
        voiced = seg_f0[~np.isnan(seg_f0)]
        if voiced.size:
            pitch[i] = np.log(voiced).mean()
        energy[i] = rms[start:start + d].mean() if d > 0 else 0.0
        start += d
    return durations, pitch, energy


def prepare_records(manifest: DatasetManifest, vocab: Vocabulary, lexicon: Lexicon,
                    split: str) -> list[EncodedRecord]:
    with_emotion = manifest.version != "real_style"
    names = list(FACTOR_CATEGORIES) if with_emotion else list(FACTOR_CATEGORIES)[:-1]
    out = []
    for record in manifest.split(split):
        tokens = tokenize_prompt(record.style_prompt, vocab)
        phonemes = g2p(record.content_prompt, lexicon)
        wave = manifest.load_audio(record)
        mel = mel_from_wave(wave)
        durations, pitch, energy = phoneme_targets(wave, len(phonemes), mel.shape[0])
        label_ids = {
            name: FACTOR_CATEGORIES[name].index(getattr(record.factors, name))
            for name in names
        }
        out.append(EncodedRecord(
            id=record.id,
            token_ids=np.asarray(tokens.ids, dtype=np.int64),
            phoneme_ids=np.asarray(phonemes.ids, dtype=np.int64),
            durations=durations, pitch=pitch, energy=energy, mel=mel,
            label_ids=label_ids, record=record,
        ))
    return out


def bucket_ranges(records: list[EncodedRecord]):
    """(pitch_min, pitch_max, energy_min, energy_max) over voiced/active targets."""
    pitch_values = np.concatenate([r.pitch[r.pitch > 0] for r in records if (r.pitch > 0).any()])
    energy_values = np.concatenate([r.energy for r in records])
    return (float(pitch_values.min()), float(pitch_values.max()),
            float(energy_values.min()), float(energy_values.max()))


def collate(batch: list[EncodedRecord]) -> dict[str, torch.Tensor]:
    b = len(batch)
    token_lengths = torch.tensor([len(r.token_ids) for r in batch], dtype=torch.long)
    phon_lengths = torch.tensor([len(r.phoneme_ids) for r in batch], dtype=torch.long)
    frame_lengths = torch.tensor([r.n_frames for r in batch], dtype=torch.long)
    tokens = torch.zeros(b, int(token_lengths.max()), dtype=torch.long)
    phonemes = torch.zeros(b, int(phon_lengths.max()), dtype=torch.long)
    durations = torch.zeros(b, int(phon_lengths.max()), dtype=torch.long)
    pitch = torch.zeros(b, int(phon_lengths.max()))
    energy = torch.zeros(b, int(phon_lengths.max()))
    mels = torch.zeros(b, int(frame_lengths.max()), batch[0].mel.shape[1])
    for i, r in enumerate(batch):
        tokens[i, :len(r.token_ids)] = torch.from_numpy(r.token_ids)
        phonemes[i, :len(r.phoneme_ids)] = torch.from_numpy(r.phoneme_ids)
        durations[i, :len(r.durations)] = torch.from_numpy(r.durations)
        pitch[i, :len(r.pitch)] = torch.from_numpy(r.pitch.astype(np.float32))
        energy[i, :len(r.energy)] = torch.from_numpy(r.energy.astype(np.float32))
        mels[i, :r.n_frames] = torch.from_numpy(r.mel.astype(np.float32))
    labels = {}
    for name in batch[0].label_ids:
        labels[name] = torch.tensor([r.label_ids[name] for r in batch], dtype=torch.long)
    return {
        "tokens": tokens, "token_lengths": token_lengths,
        "phonemes": phonemes, "phoneme_lengths": phon_lengths,
        "durations": durations, "pitch": pitch, "energy": energy,
        "mels": mels, "frame_lengths": frame_lengths, "labels": labels,
    }


class BatchIterator:
    """Random batches in a fixed-seed order, cycling indefinitely.

    Batches are NOT length-bucketed on purpose: bucketing by frame count makes
    the teacher durations nearly constant within a batch, which starves the
    duration predictor of within-batch contrast and collapses it to the corpus
    mean. Mixed-length batches cost some padding but keep every variance
    stream learnable.
    """

    def __init__(self, records: list[EncodedRecord], batch_size: int, seed: int):
        self.records = sorted(records, key=lambda r: r.id)
        self.batch_size = batch_size
        self.rng = np.random.default_rng(seed)

    def __iter__(self):
        n = len(self.records)
        while True:
            order = self.rng.permutation(n)
            for start in range(0, n - n % self.batch_size, self.batch_size):
                picks = [self.records[int(i)] for i in order[start:start + self.batch_size]]
                yield collate(picks)
