"""Desk-scale corpus construction: oracle audio, measurement-grounded labels, manifest."""
from __future__ import annotations

import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from prompttts.dsp import measure_style, read_wav, write_wav
from prompttts.factors import StyleFactors, TERCILE_FACTORS, all_factor_tuples
from prompttts.oracle import map_factors_to_voice, synthesize_oracle
from prompttts.templates import TemplateBank, render_style_prompt
from prompttts.terciles import apply_thresholds, categorize_by_proportion, tercile_thresholds
from prompttts.textfront import Lexicon, _data_path, g2p

SYNTH_VERSION = "synthesized_style"
REAL_VERSION = "real_style"
MANIFEST_NAME = "manifest.jsonl"
META_NAME = "meta.json"


@dataclass(frozen=True)
class PromptRecord:
    """One corpus row."""

    id: str
    style_prompt: str
    content_prompt: str
    factors: StyleFactors
    audio_path: str
    split: str
    provider: str = "oracle"

    def __post_init__(self):
        if ":" in self.style_prompt:
            raise ValueError(f"style prompt contains a colon: {self.style_prompt!r}")
        if not self.content_prompt.strip():
            raise ValueError("content prompt is empty")
        if self.split not in ("train", "test"):
            raise ValueError(f"invalid split {self.split!r}")
        if self.provider not in ("oracle", "external"):
            raise ValueError(f"invalid provider {self.provider!r}")

    def to_json(self) -> str:
        payload = {
            "id": self.id,
            "style_prompt": self.style_prompt,
            "content_prompt": self.content_prompt,
            "factors": self.factors.as_dict(),
            "audio_path": self.audio_path,
            "split": self.split,
            "provider": self.provider,
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "PromptRecord":
        raw = json.loads(line)
        return cls(
            id=raw["id"],
            style_prompt=raw["style_prompt"],
            content_prompt=raw["content_prompt"],
            factors=StyleFactors(**raw["factors"]),
            audio_path=raw["audio_path"],
            split=raw["split"],
            provider=raw.get("provider", "oracle"),
        )


@dataclass
class DatasetManifest:
    records: list[PromptRecord]
    version: str
    root: Path | None = None
    thresholds: dict[str, tuple[float, float]] = field(default_factory=dict)
    measurements: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def counts(self) -> dict[str, int]:
        out = {"train": 0, "test": 0}
        for r in self.records:
            out[r.split] += 1
        return out

    def split(self, name: str) -> list[PromptRecord]:
        return [r for r in self.records if r.split == name]

    def load_audio(self, record: PromptRecord) -> np.ndarray:
        if self.root is None:
            raise ValueError("manifest has no root directory to resolve audio paths")
        return read_wav(Path(self.root) / record.audio_path)

    def validate(self) -> None:
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate record ids in manifest")
        train_ids = {r.id for r in self.records if r.split == "train"}
        test_ids = {r.id for r in self.records if r.split == "test"}
        if train_ids & test_ids:
            raise ValueError("train/test ids are not disjoint")
        if self.version == REAL_VERSION:
            if any(r.factors.emotion is not None for r in self.records):
                raise ValueError("real-style manifest must not carry emotion labels")
        elif any(r.factors.emotion is None for r in self.records):
            raise ValueError("synthesized-style manifest requires emotion labels")


@dataclass(frozen=True)
class BuildConfig:
    train_size: int = 900
    test_size: int = 90
    version: str = SYNTH_VERSION
    seed: int = 7
    content_pool: str | None = None
    template_bank: str | None = None


def load_content_pool(path=None) -> list[str]:
    path = path or _data_path("contents.txt")
    return [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.startswith("#")]


def save_manifest(manifest: DatasetManifest, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / MANIFEST_NAME
    with open(path, "w", encoding="utf-8") as f:
        for record in manifest.records:
            f.write(record.to_json() + "\n")
    meta = {
        "version": manifest.version,
        "counts": manifest.counts,
        "thresholds": {k: list(v) for k, v in manifest.thresholds.items()},
        "measurements": manifest.measurements,
    }
    (out_dir / META_NAME).write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def load_manifest(root) -> DatasetManifest:
    root = Path(root)
    records = [PromptRecord.from_json(line)
               for line in (root / MANIFEST_NAME).read_text(encoding="utf-8").splitlines()
               if line.strip()]
    meta_path = root / META_NAME
    version = SYNTH_VERSION
    thresholds: dict[str, tuple[float, float]] = {}
    measurements: dict[str, dict[str, float]] = {}
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        version = meta.get("version", SYNTH_VERSION)
        thresholds = {k: (float(v[0]), float(v[1]))
                      for k, v in meta.get("thresholds", {}).items()}
        measurements = meta.get("measurements", {})
    manifest = DatasetManifest(records=records, version=version, root=root,
                               thresholds=thresholds, measurements=measurements)
    manifest.validate()
    return manifest


def _assign_tuples(count: int, prefix: str, with_emotion: bool,
                   rng: np.random.Generator) -> list[tuple[str, StyleFactors]]:
    """Cycle a shuffled category product, so any count stays balanced while
    large counts cover the whole product."""
    product = all_factor_tuples(with_emotion)
    order = rng.permutation(len(product))
    tuples = [product[int(order[i % len(product)])] for i in range(count)]
    width = max(4, len(str(count)))
    return [(f"{prefix}-{i:0{width}d}", tuples[i]) for i in range(count)]


def build_dataset(config: BuildConfig, out_dir) -> DatasetManifest:
    """Render audio for sampled factor tuples and write a labeled manifest.

    Stored pitch/speed/volume labels are re-derived from measurements of the
    rendered audio: train records are categorized by ascending thirds, the
    implied boundary values are frozen, and test records are labeled with
    those frozen thresholds. Style prompts are rendered from the final labels.
    """
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()):
        raise FileExistsError(f"output directory {out_dir} is not empty")
    created = out_dir
    try:
        return _build(config, out_dir)
    except Exception:
        shutil.rmtree(created, ignore_errors=True)
        raise


def _build(config: BuildConfig, out_dir: Path) -> DatasetManifest:
    if config.version not in (SYNTH_VERSION, REAL_VERSION):
        raise ValueError(f"unknown corpus version {config.version!r}")
    with_emotion = config.version == SYNTH_VERSION
    bank = TemplateBank.load(config.template_bank)
    lexicon = Lexicon.load()
    contents = load_content_pool(config.content_pool)
    (out_dir / "audio").mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xC0]))
    plan = (_assign_tuples(config.train_size, "train", with_emotion, rng)
            + _assign_tuples(config.test_size, "test", with_emotion, rng))

    rows = []
    for index, (rec_id, factors) in enumerate(plan):
        rec_seed = int(np.random.default_rng(
            np.random.SeedSequence([config.seed, 1, index])).integers(2 ** 31))
        content = contents[int(rng.integers(len(contents)))]
        phonemes = g2p(content, lexicon)
        spec = map_factors_to_voice(factors, rec_seed)
        wave = synthesize_oracle(phonemes, spec)
        audio_rel = f"audio/{rec_id}.wav"
        write_wav(out_dir / audio_rel, wave)
        m = measure_style(wave, len(phonemes))
        if m.f0_mean is None:
            raise RuntimeError(f"record {rec_id} measured fully unvoiced; "
                               "oracle parameters should always leave F0 measurable")
        rows.append({
            "id": rec_id, "factors": factors, "content": content,
            "audio": audio_rel, "seed": rec_seed, "index": index,
            "split": "train" if rec_id.startswith("train") else "test",
            "values": {"pitch": m.f0_mean, "speed": m.rate, "volume": m.rms},
        })

    # Measurement-grounded tercile labels: rank the train split, freeze the
    # boundary values, threshold the test split.
    thresholds: dict[str, tuple[float, float]] = {}
    train_rows = [r for r in rows if r["split"] == "train"]
    for factor in TERCILE_FACTORS:
        train_values = [(r["id"], r["values"][factor]) for r in train_rows]
        labels = categorize_by_proportion(train_values)
        thresholds[factor] = tercile_thresholds([v for _, v in train_values])
        for r in rows:
            if r["split"] == "train":
                r.setdefault("labels", {})[factor] = labels[r["id"]]
            else:
                r.setdefault("labels", {})[factor] = apply_thresholds(
                    r["values"][factor], thresholds[factor])

    records = []
    measurements: dict[str, dict[str, float]] = {}
    for r in rows:
        final = r["factors"].replace(**r["labels"])
        prompt_rng = np.random.default_rng(
            np.random.SeedSequence([config.seed, 2, r["index"]]))
        style_prompt = render_style_prompt(final, bank, prompt_rng)
        records.append(PromptRecord(
            id=r["id"], style_prompt=style_prompt, content_prompt=r["content"],
            factors=final, audio_path=r["audio"], split=r["split"],
        ))
        measurements[r["id"]] = {k: round(float(v), 6) for k, v in r["values"].items()}

    manifest = DatasetManifest(records=records, version=config.version, root=out_dir,
                               thresholds=thresholds, measurements=measurements)
    manifest.validate()
    save_manifest(manifest, out_dir)
    return manifest
