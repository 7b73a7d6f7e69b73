"""Experiment configuration, feature preparation, and training loops."""
from prompttts.training.config import TrainConfig
from prompttts.training.loop import train_baseline, train_classifiers, train_prompttts

__all__ = ["TrainConfig", "train_baseline", "train_classifiers", "train_prompttts"]
