"""Prompt-guided text-to-speech at desk scale."""
from prompttts.corpus import BuildConfig, DatasetManifest, PromptRecord, build_dataset, load_manifest
from prompttts.factors import StyleFactors
from prompttts.pipeline import BaselinePipeline, SynthesisPipeline, SynthesisResult
from prompttts.training import TrainConfig, train_baseline, train_classifiers, train_prompttts

__version__ = "0.1.0"

__all__ = [
    "BuildConfig",
    "DatasetManifest",
    "PromptRecord",
    "build_dataset",
    "load_manifest",
    "StyleFactors",
    "BaselinePipeline",
    "SynthesisPipeline",
    "SynthesisResult",
    "TrainConfig",
    "train_baseline",
    "train_classifiers",
    "train_prompttts",
    "__version__",
]
