"""Neural models: style encoder, content encoder, mel decoder, baseline, classifiers."""
from prompttts.models.classifier import MelFactorClassifier
from prompttts.models.content_encoder import (
    ContentEncoder,
    VariancePrediction,
    length_regulate,
    variance_loss,
)
from prompttts.models.decoder import SpecDecoder, mel_loss
from prompttts.models.style_encoder import (
    TUNING_MODES,
    StyleEncoder,
    auxiliary_loss,
)
from prompttts.models.tts import PromptTTSModel
from prompttts.models.baseline import FactorEmbedding, TwoStageModel

__all__ = [
    "MelFactorClassifier",
    "ContentEncoder",
    "VariancePrediction",
    "length_regulate",
    "variance_loss",
    "SpecDecoder",
    "mel_loss",
    "TUNING_MODES",
    "StyleEncoder",
    "auxiliary_loss",
    "PromptTTSModel",
    "FactorEmbedding",
    "TwoStageModel",
]
