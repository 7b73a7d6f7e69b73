import json
from collections import Counter

import numpy as np
import pytest

from prompttts.corpus import (
    BuildConfig,
    PromptRecord,
    build_dataset,
    load_manifest,
)
from prompttts.dsp import measure_style, read_wav
from prompttts.factors import StyleFactors
from prompttts.terciles import apply_thresholds
from prompttts.textfront import g2p


class TestPromptRecord:
    def test_rejects_colon_in_style(self):
        with pytest.raises(ValueError, match="colon"):
            PromptRecord("x", "bad: prompt", "content",
                         StyleFactors("male", "low", "low", "low", "general"),
                         "a.wav", "train")

    def test_rejects_empty_content(self):
        with pytest.raises(ValueError, match="content"):
            PromptRecord("x", "fine", "  ",
                         StyleFactors("male", "low", "low", "low", "general"),
                         "a.wav", "train")

    def test_json_roundtrip(self):
        record = PromptRecord("id1", "A man speaks.", "hello there",
                              StyleFactors("male", "high", "normal", "low", "sad"),
                              "audio/id1.wav", "test")
        assert PromptRecord.from_json(record.to_json()) == record

    def test_four_factor_json_has_no_emotion_field(self):
        record = PromptRecord("id2", "A man speaks.", "hello",
                              StyleFactors("male", "high", "normal", "low", None),
                              "audio/id2.wav", "train")
        assert "emotion" not in json.loads(record.to_json())["factors"]


class TestBuiltCorpus:
    def test_counts_and_disjoint_splits(self, tiny_corpus):
        assert tiny_corpus.counts == {"train": 48, "test": 12}
        train_ids = {r.id for r in tiny_corpus.split("train")}
        test_ids = {r.id for r in tiny_corpus.split("test")}
        assert not train_ids & test_ids

    def test_tercile_counts_on_train(self, tiny_corpus):
        for factor in ("pitch", "speed", "volume"):
            counts = Counter(getattr(r.factors, factor)
                             for r in tiny_corpus.split("train"))
            assert max(counts.values()) - min(counts.values()) <= 1

    def test_label_measurement_closure_every_record(self, tiny_corpus, lexicon):
        for record in tiny_corpus.records:
            wave = tiny_corpus.load_audio(record)
            m = measure_style(wave, len(g2p(record.content_prompt, lexicon)))
            values = {"pitch": m.f0_mean, "speed": m.rate, "volume": m.rms}
            for factor in ("pitch", "speed", "volume"):
                assert apply_thresholds(values[factor],
                                        tiny_corpus.thresholds[factor]) == \
                    getattr(record.factors, factor), (record.id, factor)

    def test_measured_monotonicity_across_categories(self, tiny_corpus):
        values = tiny_corpus.measurements
        for factor, key in (("pitch", "pitch"), ("speed", "speed"), ("volume", "volume")):
            means = {}
            for cat in ("low", "normal", "high"):
                picks = [values[r.id][key] for r in tiny_corpus.split("train")
                         if getattr(r.factors, factor) == cat]
                means[cat] = np.mean(picks)
            assert means["low"] < means["normal"] < means["high"], factor

    def test_audio_is_pcm16_mono_16k(self, tiny_corpus):
        record = tiny_corpus.records[0]
        wave = read_wav(tiny_corpus.root / record.audio_path)
        assert wave.ndim == 1 and len(wave) > 0

    def test_prompts_describe_final_labels(self, tiny_corpus):
        from prompttts.templates import TemplateBank
        bank = TemplateBank.load()
        for record in tiny_corpus.records[:20]:
            sentence = record.style_prompt.lower()
            for factor in ("pitch", "speed", "volume"):
                key = f"{factor}.{getattr(record.factors, factor)}"
                assert any(p.lower() in sentence for p in bank.options(key)), \
                    (record.id, key, sentence)

    def test_manifest_roundtrip(self, tiny_corpus):
        back = load_manifest(tiny_corpus.root)
        assert back.records == tiny_corpus.records
        assert back.thresholds == tiny_corpus.thresholds
        assert back.version == tiny_corpus.version


class TestDeterminismAndModes:
    def test_same_seed_byte_identical(self, tmp_path):
        cfg = BuildConfig(train_size=12, test_size=3, seed=42)
        a = tmp_path / "a"
        b = tmp_path / "b"
        build_dataset(cfg, a)
        build_dataset(cfg, b)
        assert (a / "manifest.jsonl").read_bytes() == (b / "manifest.jsonl").read_bytes()
        for wav in sorted(p.name for p in (a / "audio").iterdir()):
            assert (a / "audio" / wav).read_bytes() == (b / "audio" / wav).read_bytes()

    def test_different_seed_differs(self, tmp_path):
        build_dataset(BuildConfig(train_size=12, test_size=3, seed=1), tmp_path / "a")
        build_dataset(BuildConfig(train_size=12, test_size=3, seed=2), tmp_path / "b")
        assert (tmp_path / "a" / "manifest.jsonl").read_bytes() != \
            (tmp_path / "b" / "manifest.jsonl").read_bytes()

    def test_real_style_version_has_no_emotion(self, tmp_path):
        manifest = build_dataset(
            BuildConfig(train_size=12, test_size=3, seed=9, version="real_style"),
            tmp_path / "real")
        assert all(r.factors.emotion is None for r in manifest.records)
        raw = (tmp_path / "real" / "manifest.jsonl").read_text().splitlines()[0]
        assert "emotion" not in json.loads(raw)["factors"]

    def test_refuses_nonempty_output_dir(self, tmp_path):
        target = tmp_path / "occupied"
        target.mkdir()
        (target / "keep.txt").write_text("data")
        with pytest.raises(FileExistsError):
            build_dataset(BuildConfig(train_size=6, test_size=3), target)
        assert (target / "keep.txt").exists()

    def test_failure_cleans_partial_output(self, tmp_path, monkeypatch):
        import prompttts.corpus as corpus_mod
        calls = {"n": 0}
        original = corpus_mod.synthesize_oracle

        def explode_late(phonemes, spec):
            calls["n"] += 1
            if calls["n"] > 5:
                raise RuntimeError("disk full")
            return original(phonemes, spec)

        monkeypatch.setattr(corpus_mod, "synthesize_oracle", explode_late)
        target = tmp_path / "partial"
        with pytest.raises(RuntimeError, match="disk full"):
            build_dataset(BuildConfig(train_size=12, test_size=3, seed=1), target)
        assert not target.exists()
