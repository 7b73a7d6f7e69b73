"""Command-line workflow: data building, training, evaluation, synthesis, serving."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from prompttts.corpus import BuildConfig, build_dataset, load_manifest
from prompttts.dsp import write_wav
from prompttts.evaluation import EvalContext, format_accuracy_table, style_accuracy, two_stage_eval
from prompttts.models import MelFactorClassifier
from prompttts.pipeline import BaselinePipeline, SynthesisPipeline
from prompttts.textfront import split_prompt
from prompttts.training import TrainConfig, train_baseline, train_classifiers, train_prompttts


def _add_train_config_flags(parser: argparse.ArgumentParser) -> None:
    for f in fields(TrainConfig):
        kind = {int: int, float: float, str: str}[f.type if isinstance(f.type, type)
                                                  else {"int": int, "float": float,
                                                        "str": str}[f.type]]
        parser.add_argument(f"--{f.name.replace('_', '-')}", type=kind, default=None,
                            dest=f.name, help=f"override config field {f.name}")


def _resolve_config(args) -> TrainConfig:
    base = TrainConfig.from_yaml(args.config) if args.config else TrainConfig()
    overrides = {f.name: getattr(args, f.name) for f in fields(TrainConfig)}
    return base.with_overrides(**overrides)


def _load_classifiers(classifier_dir) -> dict:
    out = {}
    if classifier_dir:
        for name in ("gender", "emotion"):
            if Path(classifier_dir, f"{name}.json").exists():
                out[name] = MelFactorClassifier.load(Path(classifier_dir) / name)
    return out


def _cmd_build_data(args) -> int:
    config = BuildConfig(train_size=args.train_size, test_size=args.test_size,
                         version=args.version, seed=args.seed)
    manifest = build_dataset(config, args.out)
    counts = manifest.counts
    print(f"built {counts['train']} train / {counts['test']} test records "
          f"({manifest.version}) in {args.out}")
    return 0


def _cmd_train(args) -> int:
    run_dir = train_prompttts(_resolve_config(args))
    print(f"training complete: {run_dir}")
    return 0


def _cmd_train_baseline(args) -> int:
    run_dir = train_baseline(_resolve_config(args))
    print(f"baseline training complete: {run_dir}")
    return 0


def _cmd_train_classifiers(args) -> int:
    run_dir = train_classifiers(_resolve_config(args))
    print((Path(run_dir) / "accuracy.json").read_text(encoding="utf-8"))
    return 0


def _print_classifier_block(classifier_dir) -> None:
    path = Path(classifier_dir) / "accuracy.json"
    if not path.exists():
        return
    data = json.loads(path.read_text(encoding="utf-8"))
    acc = data.get("held_out_percent", {})
    print("Classifier held-out accuracy (%)")
    print(f"{'Version':<20}{'Gender':>8}{'Emotion':>9}")
    gender = f"{acc['gender']:.2f}" if "gender" in acc else "-"
    emotion = f"{acc['emotion']:.2f}" if "emotion" in acc else "-"
    print(f"{data.get('version', '?'):<20}{gender:>8}{emotion:>9}")
    print()


def _cmd_eval(args) -> int:
    manifest = load_manifest(args.corpus)
    records = manifest.split(args.split)
    ctx = EvalContext.from_manifest(manifest, _load_classifiers(args.classifier_dir))
    if args.classifier_dir:
        _print_classifier_block(args.classifier_dir)

    sections = []
    if args.system in ("prompttts", "both"):
        rows = {}
        for spec in args.run_dir or []:
            name, _, path = spec.rpartition("=")
            name = name or "prompttts"
            pipeline = SynthesisPipeline.from_run_dir(path)
            rows[name] = style_accuracy(
                records,
                lambda r, p=pipeline: p.synthesize(r.style_prompt, r.content_prompt).waveform,
                ctx)
        if rows:
            sections.append(format_accuracy_table(
                rows, f"Style-control accuracy (%), split={args.split}"))
    if args.system in ("two-stage", "both"):
        if not args.baseline_dir:
            print("error: --baseline-dir is required for two-stage evaluation",
                  file=sys.stderr)
            return 2
        baseline = BaselinePipeline.from_run_dir(args.baseline_dir)
        reports = two_stage_eval(records, baseline, ctx)
        sections.append(format_accuracy_table(
            {"Two-stage": reports["Cascaded"]},
            f"Two-stage cascaded accuracy (%), split={args.split}"))
        sections.append(format_accuracy_table(
            {k: v for k, v in reports.items() if k in ("One", "Two")},
            "Per-stage accuracy (%)", label="Stage"))

    output = "\n\n".join(sections)
    print(output)
    if args.out:
        Path(args.out).write_text(output + "\n", encoding="utf-8")
    return 0


def _cmd_synth(args, parser: argparse.ArgumentParser) -> int:
    try:
        style, content = split_prompt(args.prompt)
    except ValueError as exc:
        parser.error(str(exc))  # exits 2
    pipeline = SynthesisPipeline.from_run_dir(args.run_dir) if args.run_dir \
        else SynthesisPipeline.from_run_dir(_default_run_dir(parser))
    result = pipeline.synthesize(style, content)
    write_wav(args.out, result.waveform)
    m = result.measurement
    f0 = f"{m.f0_mean:.1f} Hz" if m.f0_mean is not None else "unvoiced"
    print(f"wrote {args.out}  (f0 {f0}, rate {m.rate:.2f} ph/s, rms {m.rms:.4f})")
    print(f"predicted factors: {result.predicted_factors.as_dict()}")
    return 0


def _default_run_dir(parser) -> str:
    import os
    run_dir = os.environ.get("PROMPTTTS_RUN_DIR")
    if not run_dir:
        parser.error("no --run-dir given and PROMPTTTS_RUN_DIR is not set")
    return run_dir


def _cmd_serve(args) -> int:
    import uvicorn

    from prompttts.server import create_app
    app = create_app(run_dir=args.run_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prompttts",
                                     description="Prompt-guided TTS workflow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-data", help="build the oracle corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--train-size", type=int, default=900)
    p.add_argument("--test-size", type=int, default=90)
    p.add_argument("--version", choices=["synthesized_style", "real_style"],
                   default="synthesized_style")
    p.add_argument("--seed", type=int, default=7)

    for name in ("train", "train-baseline", "train-classifiers"):
        p = sub.add_parser(name, help=f"{name.replace('-', ' ')} on a built corpus")
        p.add_argument("--config", default=None, help="YAML config file")
        _add_train_config_flags(p)

    p = sub.add_parser("eval", help="style-control accuracy reports")
    p.add_argument("--corpus", required=True)
    p.add_argument("--system", choices=["prompttts", "two-stage", "both"],
                   default="prompttts")
    p.add_argument("--run-dir", action="append",
                   help="prompttts run dir, optionally name=path; repeatable")
    p.add_argument("--baseline-dir", default=None)
    p.add_argument("--classifier-dir", default=None)
    p.add_argument("--split", choices=["train", "test"], default="test")
    p.add_argument("--out", default=None, help="also write the report to this file")

    p = sub.add_parser("synth", help="synthesize one prompt to a WAV file")
    p.add_argument("--prompt", required=True, help='"<style prompt>: <content prompt>"')
    p.add_argument("--out", default="out.wav")
    p.add_argument("--run-dir", default=None)

    p = sub.add_parser("serve", help="run the HTTP inference service")
    p.add_argument("--run-dir", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "build-data":
            return _cmd_build_data(args)
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "train-baseline":
            return _cmd_train_baseline(args)
        if args.command == "train-classifiers":
            return _cmd_train_classifiers(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "synth":
            return _cmd_synth(args, parser)
        if args.command == "serve":
            return _cmd_serve(args)
    except Exception as exc:  # runtime failure -> exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
