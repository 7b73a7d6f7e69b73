"""RIFF WAV I/O, fixed at mono 16 kHz PCM16."""
from __future__ import annotations

import io
import wave
from pathlib import Path

import numpy as np

from prompttts.validation import check_waveform

SAMPLE_RATE = 16000


def wav_bytes(samples, sample_rate: int = SAMPLE_RATE) -> bytes:
    """Encode float samples in [-1, 1] as an in-memory mono PCM16 RIFF file."""
    samples = check_waveform(samples)
    pcm = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(sample_rate)
        f.writeframes(pcm.tobytes())
    return buf.getvalue()


def write_wav(path, samples, sample_rate: int = SAMPLE_RATE) -> str:
    """Write float samples in [-1, 1] as mono PCM16."""
    samples = check_waveform(samples)
    pcm = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(sample_rate)
        f.writeframes(pcm.tobytes())
    return str(path)


def read_wav(path) -> np.ndarray:
    """Read a mono 16 kHz PCM16 WAV back to float64 in [-1, 1]."""
    with wave.open(str(path), "rb") as f:
        if f.getnchannels() != 1:
            raise ValueError(f"{path}: expected mono audio, got {f.getnchannels()} channels")
        if f.getsampwidth() != 2:
            raise ValueError(f"{path}: expected PCM16, got sample width {f.getsampwidth()}")
        if f.getframerate() != SAMPLE_RATE:
            raise ValueError(f"{path}: expected {SAMPLE_RATE} Hz, got {f.getframerate()}")
        raw = f.readframes(f.getnframes())
    pcm = np.frombuffer(raw, dtype="<i2")
    return pcm.astype(np.float64) / 32767.0
