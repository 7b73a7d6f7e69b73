"""Style-control accuracy protocol and report formatting."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from prompttts.corpus import DatasetManifest, PromptRecord
from prompttts.dsp import estimate_f0, estimate_rate, estimate_volume, mel_from_wave
from prompttts.factors import FACTOR_NAMES, TERCILE_FACTORS
from prompttts.terciles import apply_thresholds
from prompttts.textfront import Lexicon, g2p

log = logging.getLogger(__name__)

COLUMN_ORDER = ("gender", "pitch", "speed", "volume", "emotion")


@dataclass
class AccuracyReport:
    """Per-factor accuracy percentages plus their arithmetic mean."""

    per_factor: dict[str, float]
    n_records: int
    failures: int = 0

    @property
    def mean(self) -> float:
        values = [self.per_factor[k] for k in COLUMN_ORDER if k in self.per_factor]
        return float(np.mean(values)) if values else 0.0

    def row(self) -> list[str]:
        cells = []
        for name in COLUMN_ORDER:
            cells.append(f"{self.per_factor[name]:.2f}" if name in self.per_factor else "-")
        cells.append(f"{self.mean:.2f}")
        return cells


def format_accuracy_table(rows: dict[str, AccuracyReport], title: str,
                          label: str = "Setting") -> str:
    header = [label] + [c.capitalize() for c in COLUMN_ORDER] + ["Mean"]
    body = [[name] + report.row() for name, report in rows.items()]
    widths = [max(len(str(r[i])) for r in [header] + body) for i in range(len(header))]
    lines = [title]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


@dataclass
class EvalContext:
    """Everything the accuracy protocol needs besides the synthesizer."""

    thresholds: dict[str, tuple[float, float]]
    classifiers: dict[str, object] = field(default_factory=dict)
    lexicon: Lexicon | None = None

    def __post_init__(self):
        if self.lexicon is None:
            self.lexicon = Lexicon.load()

    @classmethod
    def from_manifest(cls, manifest: DatasetManifest, classifiers=None) -> "EvalContext":
        if not manifest.thresholds:
            raise ValueError("manifest carries no frozen tercile thresholds")
        return cls(thresholds=dict(manifest.thresholds), classifiers=classifiers or {})


def _judge_record(record: PromptRecord, wave: np.ndarray, ctx: EvalContext) -> dict[str, bool]:
    """Per-factor correctness of one synthesized waveform."""
    out: dict[str, bool] = {}
    phoneme_count = len(g2p(record.content_prompt, ctx.lexicon))

    f0 = estimate_f0(wave)
    measured = {
        "pitch": f0,
        "speed": estimate_rate(wave, phoneme_count),
        "volume": estimate_volume(wave),
    }
    for name in TERCILE_FACTORS:
        if measured[name] is None:
            out[name] = False
            continue
        category = apply_thresholds(float(measured[name]), ctx.thresholds[name])
        out[name] = category == getattr(record.factors, name)

    names = record.factors.names
    mel = None
    for name in ("gender", "emotion"):
        if name not in names:
            continue
        clf = ctx.classifiers.get(name)
        if clf is None:
            continue
        if mel is None:
            mel = mel_from_wave(wave)
        predicted = clf.predict([mel])[0]
        out[name] = predicted == getattr(record.factors, name)
    return out


def style_accuracy(records: list[PromptRecord], synth_fn, ctx: EvalContext) -> AccuracyReport:
    """Synthesize every record, extract style factors, and compare to the labels.

    ``synth_fn(record)`` returns a waveform; a failure counts as incorrect on
    all factors and is logged.
    """
    if not records:
        raise ValueError("no records to evaluate")
    judged_factors = [n for n in COLUMN_ORDER
                      if n in records[0].factors.names
                      and (n in TERCILE_FACTORS or n in ctx.classifiers)]
    correct = {name: 0 for name in judged_factors}
    failures = 0
    for record in records:
        try:
            wave = synth_fn(record)
            verdicts = _judge_record(record, wave, ctx)
        except Exception as exc:  # synthesis failure counts as fully incorrect
            failures += 1
            log.warning("synthesis failed for %s: %s", record.id, exc)
            continue
        for name in judged_factors:
            if verdicts.get(name, False):
                correct[name] += 1
    n = len(records)
    per_factor = {name: 100.0 * correct[name] / n for name in judged_factors}
    return AccuracyReport(per_factor=per_factor, n_records=n, failures=failures)


def stage1_accuracy(records: list[PromptRecord], classify_fn) -> AccuracyReport:
    """Per-factor accuracy of explicit prompt classification."""
    if not records:
        raise ValueError("no records to evaluate")
    names = [n for n in COLUMN_ORDER if n in records[0].factors.names]
    correct = {name: 0 for name in names}
    for record in records:
        predicted = classify_fn(record.style_prompt)
        for name in names:
            if getattr(predicted, name) == getattr(record.factors, name):
                correct[name] += 1
    per_factor = {name: 100.0 * correct[name] / len(records) for name in names}
    return AccuracyReport(per_factor=per_factor, n_records=len(records))


def two_stage_eval(records: list[PromptRecord], baseline, ctx: EvalContext
                   ) -> dict[str, AccuracyReport]:
    """(stage-1 classification, stage-2 with ground-truth factors, cascaded)."""
    reports = {
        "One": stage1_accuracy(records, baseline.classify),
        "Two": style_accuracy(
            records,
            lambda r: baseline.synthesize_from_factors(r.factors, r.content_prompt),
            ctx),
        "Cascaded": style_accuracy(
            records,
            lambda r: baseline.synthesize_cascaded(r.style_prompt, r.content_prompt),
            ctx),
    }
    return reports
