"""Short-time analysis: STFT, 80-band log-mel spectrograms, and the mel dump format.

All analysis is pinned to mono 16 kHz audio with a 12.5 ms hop and a 50 ms
Hann window; mel spectrograms are natural-log magnitude with a fixed floor.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from scipy.signal import get_window

from prompttts.validation import check_mel, check_waveform

SAMPLE_RATE = 16000
HOP_LENGTH = 200      # 12.5 ms
WIN_LENGTH = 800      # 50 ms
N_FFT = 1024
N_MELS = 80
FMIN = 0.0
FMAX = 8000.0
AMP_FLOOR = 1e-5
LOG_FLOOR = float(np.log(AMP_FLOOR))
FRAME_RATE = SAMPLE_RATE / HOP_LENGTH  # 80 frames/s


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int = N_MELS, n_fft: int = N_FFT,
                   sample_rate: int = SAMPLE_RATE,
                   fmin: float = FMIN, fmax: float = FMAX) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, n_fft // 2 + 1)."""
    n_bins = n_fft // 2 + 1
    fft_freqs = np.linspace(0.0, sample_rate / 2.0, n_bins)
    mel_pts = np.linspace(_hz_to_mel(fmin), _hz_to_mel(fmax), n_mels + 2)
    hz_pts = _mel_to_hz(mel_pts)
    fb = np.zeros((n_mels, n_bins))
    for i in range(n_mels):
        left, center, right = hz_pts[i], hz_pts[i + 1], hz_pts[i + 2]
        up = (fft_freqs - left) / max(center - left, 1e-9)
        down = (right - fft_freqs) / max(right - center, 1e-9)
        fb[i] = np.maximum(0.0, np.minimum(up, down))
    return fb


_FB_CACHE: dict[tuple, np.ndarray] = {}


def _filterbank() -> np.ndarray:
    key = (N_MELS, N_FFT, SAMPLE_RATE, FMIN, FMAX)
    if key not in _FB_CACHE:
        _FB_CACHE[key] = mel_filterbank()
    return _FB_CACHE[key]


def _analysis_window() -> np.ndarray:
    w = get_window("hann", WIN_LENGTH, fftbins=True)
    return np.pad(w, (0, N_FFT - WIN_LENGTH))


def frame_signal(w: np.ndarray) -> np.ndarray:
    """Center-padded frames of length N_FFT, one per hop; shape (frames, N_FFT)."""
    pad = N_FFT // 2
    padded = np.pad(w, (pad, pad), mode="reflect")
    n_frames = 1 + (len(padded) - N_FFT) // HOP_LENGTH
    idx = np.arange(N_FFT)[None, :] + HOP_LENGTH * np.arange(n_frames)[:, None]
    return padded[idx]


def stft_magnitude(w: np.ndarray) -> np.ndarray:
    """Magnitude spectrogram, shape (frames, N_FFT // 2 + 1)."""
    w = check_waveform(w)
    if len(w) < WIN_LENGTH:
        raise ValueError(f"input too short: {len(w)} samples < one {WIN_LENGTH}-sample window")
    frames = frame_signal(w) * _analysis_window()[None, :]
    return np.abs(np.fft.rfft(frames, n=N_FFT, axis=1))


def mel_from_wave(w) -> np.ndarray:
    """Log-magnitude mel spectrogram, shape (frames, N_MELS)."""
    mag = stft_magnitude(w)
    mel = mag @ _filterbank().T
    return np.log(np.maximum(mel, AMP_FLOOR))


def save_mel(path, mel) -> str:
    """Dump a mel as <i4 frames, <i4 bins, then row-major <f4 data."""
    mel = check_mel(mel)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(struct.pack("<ii", mel.shape[0], mel.shape[1]))
        f.write(mel.astype("<f4").tobytes())
    return str(path)


def load_mel(path) -> np.ndarray:
    with open(path, "rb") as f:
        frames, bins = struct.unpack("<ii", f.read(8))
        data = np.frombuffer(f.read(), dtype="<f4")
    if data.size != frames * bins:
        raise ValueError(f"{path}: header says {frames}x{bins}, payload has {data.size} floats")
    return data.reshape(frames, bins).astype(np.float64)
