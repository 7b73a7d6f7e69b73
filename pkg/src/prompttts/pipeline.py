"""Prompt-to-audio inference pipeline shared by the CLI, the service, and evaluation."""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from prompttts.dsp import GriffinLimVocoder, StyleMeasurement, measure_style
from prompttts.factors import StyleFactors
from prompttts.models import PromptTTSModel, TwoStageModel
from prompttts.textfront import Lexicon, Vocabulary, g2p, split_prompt, tokenize_prompt

import torch


@dataclass
class SynthesisResult:
    waveform: np.ndarray
    mel: np.ndarray
    measurement: StyleMeasurement
    predicted_factors: StyleFactors
    timing_ms: dict[str, float]


class SynthesisPipeline:
    """Text frontend + acoustic model + vocoder + measurement."""

    def __init__(self, model: PromptTTSModel, vocab: Vocabulary | None = None,
                 lexicon: Lexicon | None = None, vocoder=None):
        self.model = model
        self.model.eval()
        self.vocab = vocab or Vocabulary.load()
        self.lexicon = lexicon or Lexicon.load()
        self.vocoder = vocoder or GriffinLimVocoder()

    @classmethod
    def from_run_dir(cls, run_dir) -> "SynthesisPipeline":
        return cls(PromptTTSModel.load(Path(run_dir)))

    def synthesize(self, style_prompt: str, content_prompt: str) -> SynthesisResult:
        t0 = time.perf_counter()
        tokens = tokenize_prompt(style_prompt, self.vocab)
        phonemes = g2p(content_prompt, self.lexicon)
        t1 = time.perf_counter()
        token_ids = torch.tensor([tokens.ids], dtype=torch.long)
        phoneme_ids = torch.tensor([phonemes.ids], dtype=torch.long)
        mel, predicted = self.model.synthesize_mel(token_ids, phoneme_ids)
        mel = mel.numpy().astype(np.float64)
        t2 = time.perf_counter()
        wave = np.clip(self.vocoder(mel), -1.0, 1.0)
        t3 = time.perf_counter()
        measurement = measure_style(wave, len(phonemes))
        t4 = time.perf_counter()
        timing = {
            "text_ms": 1000 * (t1 - t0),
            "acoustic_ms": 1000 * (t2 - t1),
            "vocoder_ms": 1000 * (t3 - t2),
            "measure_ms": 1000 * (t4 - t3),
            "total_ms": 1000 * (t4 - t0),
        }
        return SynthesisResult(waveform=wave, mel=mel, measurement=measurement,
                               predicted_factors=predicted, timing_ms=timing)

    def synthesize_prompt(self, full_prompt: str) -> SynthesisResult:
        style, content = split_prompt(full_prompt)
        return self.synthesize(style, content)


class BaselinePipeline:
    """Inference over the two-stage baseline, cascaded or from given factors."""

    def __init__(self, model: TwoStageModel, vocab: Vocabulary | None = None,
                 lexicon: Lexicon | None = None, vocoder=None):
        self.model = model
        self.model.eval()
        self.vocab = vocab or Vocabulary.load()
        self.lexicon = lexicon or Lexicon.load()
        self.vocoder = vocoder or GriffinLimVocoder()

    @classmethod
    def from_run_dir(cls, run_dir) -> "BaselinePipeline":
        return cls(TwoStageModel.load(Path(run_dir)))

    def classify(self, style_prompt: str) -> StyleFactors:
        tokens = tokenize_prompt(style_prompt, self.vocab)
        return self.model.classify_prompt(torch.tensor([tokens.ids], dtype=torch.long))

    def synthesize_from_factors(self, factors: StyleFactors, content_prompt: str) -> np.ndarray:
        phonemes = g2p(content_prompt, self.lexicon)
        mel = self.model.synthesize_mel_from_factors(
            factors, torch.tensor([phonemes.ids], dtype=torch.long))
        return np.clip(self.vocoder(mel.numpy().astype(np.float64)), -1.0, 1.0)

    def synthesize_cascaded(self, style_prompt: str, content_prompt: str) -> np.ndarray:
        return self.synthesize_from_factors(self.classify(style_prompt), content_prompt)
