"""Convolutional-recurrent classifiers over mel input for gender and emotion."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from prompttts.nn import load_checkpoint, save_checkpoint


class _MelNet(nn.Module):
    def __init__(self, n_mels: int, n_classes: int, channels: int = 64):
        super().__init__()
        self.conv1 = nn.Conv1d(n_mels, channels, 5, stride=2, padding=2)
        self.conv2 = nn.Conv1d(channels, channels, 5, stride=2, padding=2)
        self.gru = nn.GRU(channels, channels, batch_first=True)
        self.out = nn.Linear(channels, n_classes)

    def forward(self, mels: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        x = F.relu(self.conv1(mels.transpose(1, 2)))
        x = F.relu(self.conv2(x)).transpose(1, 2)
        reduced = torch.clamp((lengths + 3) // 4, min=1)
        packed = nn.utils.rnn.pack_padded_sequence(
            x, reduced.cpu(), batch_first=True, enforce_sorted=False)
        _, state = self.gru(packed)
        return self.out(state[-1])


class MelFactorClassifier(BaseEstimator, ClassifierMixin):
    """fit(mels, labels) / predict(mels) over variable-length log-mel arrays."""

    def __init__(self, factor: str = "gender", epochs: int = 30, batch_size: int = 32,
                 lr: float = 1e-3, seed: int = 0, noise_std: float = 0.2,
                 channels: int = 64):
        self.factor = factor
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.seed = seed
        self.noise_std = noise_std
        self.channels = channels
        self.classes_ = None
        self.net_ = None

    def _collate(self, mels: list[np.ndarray]):
        lengths = torch.tensor([m.shape[0] for m in mels], dtype=torch.long)
        batch = torch.zeros(len(mels), int(lengths.max()), mels[0].shape[1])
        for i, m in enumerate(mels):
            batch[i, :m.shape[0]] = torch.from_numpy(
                ((m - self.mean_) / self.std_).astype(np.float32))
        return batch, lengths

    @staticmethod
    def _augment(batch: torch.Tensor, rng: np.random.Generator,
                 noise_std: float) -> torch.Tensor:
        """Roughen training mels toward what a regression model + vocoder emits:
        temporal/spectral blur, a level offset, and additive noise."""
        out = batch
        for _ in range(int(rng.integers(0, 3))):
            padded = torch.nn.functional.pad(out.transpose(1, 2), (1, 1), mode="replicate")
            out = (0.25 * padded[:, :, :-2] + 0.5 * padded[:, :, 1:-1]
                   + 0.25 * padded[:, :, 2:]).transpose(1, 2)
        if rng.random() < 0.5:
            padded = torch.nn.functional.pad(out, (1, 1), mode="replicate")
            out = 0.25 * padded[:, :, :-2] + 0.5 * padded[:, :, 1:-1] + 0.25 * padded[:, :, 2:]
        out = out + float(rng.uniform(-0.3, 0.3))
        if noise_std > 0:
            out = out + noise_std * torch.from_numpy(
                rng.standard_normal(out.shape).astype(np.float32))
        return out

    def fit(self, X, y):
        mels = [np.asarray(m, dtype=np.float64) for m in X]
        labels = list(y)
        self.classes_ = sorted(set(labels))
        if len(self.classes_) < 2:
            raise ValueError(f"need at least two classes to train, got {self.classes_}")
        stacked = np.concatenate([m.reshape(-1) for m in mels])
        self.mean_ = float(stacked.mean())
        self.std_ = float(stacked.std() + 1e-6)

        torch.manual_seed(self.seed)
        rng = np.random.default_rng(self.seed)
        self.net_ = _MelNet(mels[0].shape[1], len(self.classes_), self.channels)
        opt = torch.optim.Adam(self.net_.parameters(), lr=self.lr)
        targets = torch.tensor([self.classes_.index(c) for c in labels], dtype=torch.long)

        self.net_.train()
        n = len(mels)
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                idx = order[start:start + self.batch_size]
                batch, lengths = self._collate([mels[i] for i in idx])
                batch = self._augment(batch, rng, self.noise_std)
                opt.zero_grad()
                loss = F.cross_entropy(self.net_(batch, lengths), targets[idx])
                loss.backward()
                opt.step()
        self.net_.eval()
        return self

    def _check_fitted(self):
        if self.net_ is None:
            raise NotFittedError("classifier has not been fitted")

    @torch.no_grad()
    def predict(self, X):
        self._check_fitted()
        mels = [np.asarray(m, dtype=np.float64) for m in X]
        out = []
        for start in range(0, len(mels), self.batch_size):
            batch, lengths = self._collate(mels[start:start + self.batch_size])
            logits = self.net_(batch, lengths)
            out.extend(self.classes_[int(i)] for i in logits.argmax(dim=1))
        return np.array(out)

    def score(self, X, y):
        pred = self.predict(X)
        return float(np.mean(pred == np.asarray(y)))

    def save(self, path_prefix) -> None:
        self._check_fitted()
        path_prefix = Path(path_prefix)
        path_prefix.parent.mkdir(parents=True, exist_ok=True)
        meta = {
            "factor": self.factor, "classes": self.classes_,
            "mean": self.mean_, "std": self.std_, "channels": self.channels,
            "n_mels": int(self.net_.conv1.in_channels),
        }
        Path(str(path_prefix) + ".json").write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        save_checkpoint(str(path_prefix) + ".ckpt", dict(self.net_.state_dict()))

    @classmethod
    def load(cls, path_prefix) -> "MelFactorClassifier":
        meta = json.loads(Path(str(path_prefix) + ".json").read_text(encoding="utf-8"))
        clf = cls(factor=meta["factor"], channels=meta["channels"])
        clf.classes_ = list(meta["classes"])
        clf.mean_ = float(meta["mean"])
        clf.std_ = float(meta["std"])
        clf.net_ = _MelNet(meta["n_mels"], len(clf.classes_), meta["channels"])
        clf.net_.load_state_dict(load_checkpoint(str(path_prefix) + ".ckpt"))
        clf.net_.eval()
        return clf
