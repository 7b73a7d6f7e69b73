import numpy as np
import pytest

from prompttts.evaluation import (
    AccuracyReport,
    EvalContext,
    format_accuracy_table,
    stage1_accuracy,
    style_accuracy,
)
from prompttts.corpus import DatasetManifest
from prompttts.factors import StyleFactors


class TestReport:
    def test_mean_is_arithmetic_over_present_factors(self):
        report = AccuracyReport({"gender": 100.0, "pitch": 50.0}, n_records=10)
        assert report.mean == 75.0

    def test_row_marks_missing_factors(self):
        report = AccuracyReport({"gender": 90.0, "pitch": 80.0, "speed": 70.0,
                                 "volume": 60.0}, n_records=10)
        row = report.row()
        assert row[-2] == "-"  # emotion absent (4-factor mode)
        assert row[-1] == "75.00"

    def test_table_has_expected_columns(self):
        report = AccuracyReport({"gender": 100.0, "pitch": 100.0, "speed": 100.0,
                                 "volume": 100.0, "emotion": 100.0}, n_records=5)
        text = format_accuracy_table({"PromptTTS": report}, "Title")
        head = text.splitlines()[1]
        for column in ("Gender", "Pitch", "Speed", "Volume", "Emotion", "Mean"):
            assert column in head


class TestStyleAccuracy:
    def test_oracle_pass_through_is_exact_on_tercile_factors(self, tiny_corpus):
        ctx = EvalContext.from_manifest(tiny_corpus)
        records = tiny_corpus.split("test")
        report = style_accuracy(records, tiny_corpus.load_audio, ctx)
        assert report.per_factor["pitch"] == 100.0
        assert report.per_factor["speed"] == 100.0
        assert report.per_factor["volume"] == 100.0
        assert report.failures == 0

    def test_silent_synthesizer_scores_zero_and_logs_failures(self, tiny_corpus):
        ctx = EvalContext.from_manifest(tiny_corpus)
        records = tiny_corpus.split("test")
        report = style_accuracy(records, lambda r: np.zeros(16000), ctx)
        assert report.failures == len(records)
        assert all(v == 0.0 for v in report.per_factor.values())

    def test_thresholds_required(self):
        manifest = DatasetManifest(records=[], version="synthesized_style")
        with pytest.raises(ValueError, match="threshold"):
            EvalContext.from_manifest(manifest)

    def test_empty_records_rejected(self, tiny_corpus):
        ctx = EvalContext.from_manifest(tiny_corpus)
        with pytest.raises(ValueError):
            style_accuracy([], lambda r: np.zeros(100), ctx)


class TestStage1Accuracy:
    def test_perfect_classifier_scores_100(self, tiny_corpus):
        records = tiny_corpus.split("test")
        lookup = {r.style_prompt: r.factors for r in records}
        report = stage1_accuracy(records, lambda prompt: lookup[prompt])
        assert report.mean == 100.0

    def test_constant_classifier_scores_below_perfect(self, tiny_corpus):
        records = tiny_corpus.split("test")
        constant = StyleFactors("male", "low", "low", "low", "general")
        report = stage1_accuracy(records, lambda prompt: constant)
        assert report.mean < 100.0
