"""Iterative phase-reconstruction vocoder over the pinned mel parameters."""
from __future__ import annotations

import numpy as np

from prompttts.dsp import mel as melmod
from prompttts.validation import check_mel


def _synthesis_window() -> np.ndarray:
    return melmod._analysis_window()


def _istft(spec: np.ndarray) -> np.ndarray:
    """Overlap-add inverse of the complex spectrogram (frames, bins)."""
    window = _synthesis_window()
    n_frames = spec.shape[0]
    n_fft, hop = melmod.N_FFT, melmod.HOP_LENGTH
    out_len = n_fft + (n_frames - 1) * hop
    out = np.zeros(out_len)
    norm = np.zeros(out_len)
    frames = np.fft.irfft(spec, n=n_fft, axis=1) * window[None, :]
    wsq = window ** 2
    for k in range(n_frames):
        start = k * hop
        out[start:start + n_fft] += frames[k]
        norm[start:start + n_fft] += wsq
    out = out / np.maximum(norm, 1e-8)
    pad = n_fft // 2
    return out[pad:out_len - pad]


_PINV_CACHE: dict[int, np.ndarray] = {}


def _mel_pinv() -> np.ndarray:
    if 0 not in _PINV_CACHE:
        _PINV_CACHE[0] = np.linalg.pinv(melmod._filterbank())
    return _PINV_CACHE[0]


def griffin_lim(mel, iterations: int = 60, seed: int = 0) -> np.ndarray:
    """Invert a log-mel spectrogram to a waveform.

    Mel magnitudes are lifted to the linear spectrum with the filterbank
    pseudo-inverse, then the phase is estimated iteratively. Output length is
    frames * hop give or take one window.
    """
    mel = check_mel(mel)
    linear = np.exp(mel)
    mag = np.maximum(linear @ _mel_pinv().T, 0.0)

    rng = np.random.default_rng(seed)
    angles = np.exp(2j * np.pi * rng.random(mag.shape))
    for _ in range(max(0, int(iterations))):
        wave = _istft(mag * angles)
        spec = np.fft.rfft(
            melmod.frame_signal(wave) * melmod._analysis_window()[None, :],
            n=melmod.N_FFT, axis=1,
        )
        spec = spec[: mag.shape[0]]
        if spec.shape[0] < mag.shape[0]:
            spec = np.pad(spec, ((0, mag.shape[0] - spec.shape[0]), (0, 0)))
        angles = np.exp(1j * np.angle(spec))
    # no normalization: output scales linearly with the mel's magnitudes
    return _istft(mag * angles)


class GriffinLimVocoder:
    """Pluggable vocoder interface: mel -> waveform."""

    def __init__(self, iterations: int = 60, seed: int = 0):
        self.iterations = iterations
        self.seed = seed

    def __call__(self, mel) -> np.ndarray:
        return griffin_lim(mel, iterations=self.iterations, seed=self.seed)
