"""Signal-side machinery: WAV I/O, mel analysis, vocoding, and style-factor extractors."""
from prompttts.dsp.features import (
    StyleMeasurement,
    estimate_f0,
    estimate_rate,
    estimate_volume,
    f0_track,
    measure_style,
    trim_silence,
)
from prompttts.dsp.mel import (
    FRAME_RATE,
    HOP_LENGTH,
    LOG_FLOOR,
    N_FFT,
    N_MELS,
    SAMPLE_RATE,
    WIN_LENGTH,
    load_mel,
    mel_filterbank,
    mel_from_wave,
    save_mel,
    stft_magnitude,
)
from prompttts.dsp.vocoder import GriffinLimVocoder, griffin_lim
from prompttts.dsp.wav import read_wav, wav_bytes, write_wav

__all__ = [
    "StyleMeasurement",
    "estimate_f0",
    "estimate_rate",
    "estimate_volume",
    "f0_track",
    "measure_style",
    "trim_silence",
    "FRAME_RATE",
    "HOP_LENGTH",
    "LOG_FLOOR",
    "N_FFT",
    "N_MELS",
    "SAMPLE_RATE",
    "WIN_LENGTH",
    "load_mel",
    "mel_filterbank",
    "mel_from_wave",
    "save_mel",
    "stft_magnitude",
    "GriffinLimVocoder",
    "griffin_lim",
    "read_wav",
    "wav_bytes",
    "write_wav",
]
