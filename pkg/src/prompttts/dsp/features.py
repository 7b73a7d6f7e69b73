"""Style-factor extractors: fundamental frequency, speaking rate, and loudness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, sosfiltfilt

from prompttts.dsp.mel import HOP_LENGTH, SAMPLE_RATE, WIN_LENGTH
from prompttts.validation import check_waveform

F0_MIN = 60.0
F0_MAX = 500.0
VOICING_THRESHOLD = 0.3   # normalized autocorrelation peak clarity
TRIM_GATE = 0.02          # fraction of the peak absolute amplitude
_LOWPASS_HZ = 1200.0      # pre-filter so the lag search sees only the F0 band


@dataclass(frozen=True)
class StyleMeasurement:
    """Continuous style measurements taken from one waveform."""

    f0_mean: float | None   # Hz over voiced frames; None when fully unvoiced
    rate: float             # phonemes per second over the active duration
    rms: float

    @property
    def voiced(self) -> bool:
        return self.f0_mean is not None


_SOS_CACHE: dict[int, np.ndarray] = {}


def _lowpass(w: np.ndarray) -> np.ndarray:
    if 0 not in _SOS_CACHE:
        _SOS_CACHE[0] = butter(4, _LOWPASS_HZ / (SAMPLE_RATE / 2), output="sos")
    return sosfiltfilt(_SOS_CACHE[0], w)


def _search_acf(acf: np.ndarray, r0: np.ndarray, lag_lo: int, lag_hi: int,
                win: int) -> np.ndarray:
    """Best-peak F0 per frame within [lag_lo, lag_hi]; NaN when below threshold."""
    n_frames = acf.shape[0]
    out = np.full(n_frames, np.nan)
    search = acf[:, lag_lo:lag_hi + 1]
    best = np.argmax(search, axis=1) + lag_lo
    peaks = acf[np.arange(n_frames), best]
    for k in range(n_frames):
        lag, peak = best[k], peaks[k]
        if peak < VOICING_THRESHOLD or r0[k] <= 1e-10:
            continue
        # parabolic interpolation around the peak for sub-sample lag accuracy
        if 1 <= lag < win - 1:
            a, b, c = acf[k, lag - 1], acf[k, lag], acf[k, lag + 1]
            denom = a - 2 * b + c
            if abs(denom) > 1e-12:
                lag = lag + 0.5 * (a - c) / denom
        out[k] = SAMPLE_RATE / lag
    return out


def f0_track(w, hop: int = HOP_LENGTH, win: int = WIN_LENGTH) -> np.ndarray:
    """Per-frame F0 in Hz; NaN marks unvoiced frames.

    Frame k is centered at sample k * hop. Each frame's normalized
    autocorrelation is searched for a peak in the 60-500 Hz lag range; peaks
    below the voicing threshold are unvoiced. A second pass re-searches near
    the utterance median to discard octave and formant-ringing outliers.
    """
    w = check_waveform(w)
    if len(w) < 2 * hop:
        raise ValueError(f"input too short for F0 analysis: {len(w)} samples")
    x = _lowpass(w)
    pad = win // 2
    x = np.pad(x, (pad, pad))
    n_frames = 1 + (len(x) - win) // hop
    lag_min = int(SAMPLE_RATE / F0_MAX)
    lag_max = int(np.ceil(SAMPLE_RATE / F0_MIN))

    idx = np.arange(win)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = x[idx]
    frames = frames - frames.mean(axis=1, keepdims=True)

    n_fft = 1
    while n_fft < 2 * win:
        n_fft *= 2
    spec = np.fft.rfft(frames, n=n_fft, axis=1)
    acf = np.fft.irfft(spec.real ** 2 + spec.imag ** 2, n=n_fft, axis=1)[:, :win]
    r0 = np.maximum(acf[:, 0], 1e-12)
    acf = acf / r0[:, None]

    first = _search_acf(acf, r0, lag_min, lag_max, win)
    voiced = first[~np.isnan(first)]
    if voiced.size == 0:
        return first
    center = float(np.median(voiced))
    lo = max(lag_min, int(SAMPLE_RATE / (center * 1.6)))
    hi = min(lag_max, int(np.ceil(SAMPLE_RATE * 1.6 / center)))
    return _search_acf(acf, r0, lo, hi, win)


def estimate_f0(w) -> float | None:
    """Mean F0 in Hz over voiced frames, or None when no frame is voiced."""
    track = f0_track(w)
    voiced = track[~np.isnan(track)]
    if voiced.size == 0:
        return None
    return float(voiced.mean())


def trim_silence(w, gate: float = TRIM_GATE) -> tuple[int, int]:
    """(start, end) sample indices of the active region (end exclusive).

    The gate is relative to the waveform's own peak, so scaling the signal
    does not move the boundaries. Returns (0, 0) for an all-silent input.
    """
    w = check_waveform(w)
    peak = np.max(np.abs(w))
    if peak <= 0:
        return 0, 0
    active = np.flatnonzero(np.abs(w) > gate * peak)
    if active.size == 0:
        return 0, 0
    return int(active[0]), int(active[-1]) + 1


def estimate_rate(w, phoneme_count: int) -> float:
    """Phonemes per second over the silence-trimmed duration."""
    if phoneme_count < 1:
        raise ValueError(f"phoneme_count must be >= 1, got {phoneme_count}")
    start, end = trim_silence(w)
    if end <= start:
        raise ValueError("cannot estimate speaking rate of a fully silent waveform")
    return phoneme_count * SAMPLE_RATE / (end - start)


def estimate_volume(w) -> float:
    """Root mean square over the active (non-trimmed) samples."""
    w = check_waveform(w)
    start, end = trim_silence(w)
    if end <= start:
        return 0.0
    active = w[start:end]
    return float(np.sqrt(np.mean(active ** 2)))


def measure_style(w, phoneme_count: int) -> StyleMeasurement:
    """All three extractors over one waveform."""
    return StyleMeasurement(
        f0_mean=estimate_f0(w),
        rate=estimate_rate(w, phoneme_count),
        rms=estimate_volume(w),
    )
