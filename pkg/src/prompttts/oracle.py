"""Deterministic parametric synthesizer that renders audio for factor tuples.

This stands in for an external TTS provider: every factor category maps to an
explicit acoustic parameter band, so the rendered audio is measurement-
verifiable by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, lfilter, sosfiltfilt

from prompttts.factors import StyleFactors
from prompttts.textfront import BOUNDARY, PhonemeSeq
from prompttts.validation import check_positive, check_unit_interval

SAMPLE_RATE = 16000

# Register and category parameter bands.
MALE_F0_BASE = 110.0
FEMALE_REGISTER = 1.8
PITCH_MULTIPLIER = {"low": 0.8, "normal": 1.0, "high": 1.25}
SPEED_DURATION = {"low": 0.28, "normal": 0.18, "high": 0.12}
VOLUME_AMPLITUDE = {"low": 0.15, "normal": 0.4, "high": 0.8}

# Emotion adjustments. The shout F0 raise is kept small enough that male and
# female registers stay disjoint; whisper keeps enough low-band harmonicity
# that F0 remains measurable.
SHOUT_F0_RAISE = 1.1
SHOUT_GAIN = 1.6
WHISPER_APERIODICITY = 0.85
WHISPER_GAIN = 0.5
SAD_DURATION_STRETCH = 1.3
BASE_APERIODICITY = 0.05

# Per-seed jitter half-widths; the draw depends on the seed only, so
# same-seed comparisons across factor tuples stay exact.
F0_JITTER = 0.02
DURATION_JITTER = 0.03
AMPLITUDE_JITTER = 0.03

VIBRATO_RATE_HZ = 5.5
VIBRATO_EXTENT = 0.04
CONTOUR_EXTENT = 0.30  # rising: 0.85x -> 1.15x across the utterance
N_HARMONICS = 12
MAX_HARMONIC_HZ = 7600.0
NOISE_HIGHPASS_HZ = 1400.0  # aspiration noise sits above the F0 band
EDGE_FADE_S = 0.004

# Nominal resonance triples (Hz) making each phoneme spectrally distinct.
FORMANTS = {
    "AA": (730, 1090, 2440), "AE": (660, 1720, 2410), "AH": (640, 1190, 2390),
    "AO": (570, 840, 2410), "AW": (700, 1030, 2400), "AY": (660, 1400, 2430),
    "EH": (530, 1840, 2480), "ER": (490, 1350, 1690), "EY": (480, 1900, 2500),
    "IH": (390, 1990, 2550), "IY": (270, 2290, 3010), "OW": (450, 950, 2350),
    "OY": (500, 1100, 2400), "UH": (440, 1020, 2240), "UW": (300, 870, 2240),
    "B": (300, 900, 2300), "CH": (500, 1900, 2900), "D": (350, 1700, 2700),
    "DH": (400, 1500, 2500), "F": (450, 1400, 2700), "G": (300, 1300, 2300),
    "HH": (600, 1500, 2600), "JH": (450, 1850, 2850), "K": (350, 1450, 2450),
    "L": (380, 1000, 2600), "M": (280, 900, 2200), "N": (300, 1500, 2500),
    "NG": (330, 1250, 2350), "P": (320, 950, 2250), "R": (420, 1250, 1700),
    "S": (550, 1750, 3200), "SH": (480, 1600, 3000), "T": (400, 1800, 2800),
    "TH": (500, 1350, 2900), "V": (350, 1050, 2350), "W": (320, 750, 2300),
    "Y": (300, 2100, 2900), "Z": (520, 1700, 3100), "ZH": (460, 1650, 2950),
}


@dataclass(frozen=True)
class OracleVoiceSpec:
    """Acoustic parameters for one utterance."""

    f0_base: float
    f0_contour: str          # flat | rising | falling
    vibrato_depth: float
    phoneme_duration: float  # seconds per phoneme
    amplitude: float
    aperiodicity: float
    seed: int

    def __post_init__(self):
        check_positive(self.f0_base, "f0_base")
        check_positive(self.phoneme_duration, "phoneme_duration")
        check_unit_interval(self.amplitude, "amplitude")
        check_unit_interval(self.aperiodicity, "aperiodicity")
        if self.f0_contour not in ("flat", "rising", "falling"):
            raise ValueError(f"unknown f0_contour {self.f0_contour!r}")


def _seed_jitter(seed: int) -> tuple[float, float, float]:
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0x5EED]))
    draws = rng.uniform(-1.0, 1.0, size=3)
    return (
        1.0 + F0_JITTER * draws[0],
        1.0 + DURATION_JITTER * draws[1],
        1.0 + AMPLITUDE_JITTER * draws[2],
    )


def map_factors_to_voice(factors: StyleFactors, seed: int) -> OracleVoiceSpec:
    """Deterministic, monotone category-to-parameter map."""
    f0_jit, dur_jit, amp_jit = _seed_jitter(seed)

    f0 = MALE_F0_BASE * PITCH_MULTIPLIER[factors.pitch]
    if factors.gender == "female":
        f0 *= FEMALE_REGISTER
    duration = SPEED_DURATION[factors.speed]
    amplitude = VOLUME_AMPLITUDE[factors.volume]
    contour = "flat"
    vibrato = 0.0
    aperiodicity = BASE_APERIODICITY

    emotion = factors.emotion or "general"
    if emotion == "shout":
        f0 *= SHOUT_F0_RAISE
        amplitude = min(1.0, amplitude * SHOUT_GAIN)
    elif emotion == "whisper":
        aperiodicity = WHISPER_APERIODICITY
        amplitude *= WHISPER_GAIN
    elif emotion == "cheerful":
        contour = "rising"
        vibrato = 0.8
    elif emotion == "sad":
        contour = "falling"
        duration *= SAD_DURATION_STRETCH

    return OracleVoiceSpec(
        f0_base=f0 * f0_jit,
        f0_contour=contour,
        vibrato_depth=vibrato,
        phoneme_duration=duration * dur_jit,
        amplitude=min(1.0, amplitude * amp_jit),
        aperiodicity=aperiodicity,
        seed=int(seed),
    )


def _resonator_coeffs(fc: float, bandwidth: float):
    r = np.exp(-np.pi * bandwidth / SAMPLE_RATE)
    theta = 2.0 * np.pi * fc / SAMPLE_RATE
    return np.array([1.0]), np.array([1.0, -2.0 * r * np.cos(theta), r * r])


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x ** 2))) if x.size else 0.0


def synthesize_oracle(phonemes: PhonemeSeq, spec: OracleVoiceSpec) -> np.ndarray:
    """Render one utterance: excitation at the F0 trajectory, per-phoneme formants."""
    if len(phonemes) == 0:
        raise ValueError("empty content")
    n = len(phonemes)
    total = int(round(n * spec.phoneme_duration * SAMPLE_RATE))

    pos = np.arange(total) / max(total - 1, 1)
    if spec.f0_contour == "rising":
        f0 = spec.f0_base * (1.0 - CONTOUR_EXTENT / 2 + CONTOUR_EXTENT * pos)
    elif spec.f0_contour == "falling":
        f0 = spec.f0_base * (1.0 + CONTOUR_EXTENT / 2 - CONTOUR_EXTENT * pos)
    else:
        f0 = np.full(total, spec.f0_base)
    if spec.vibrato_depth > 0:
        t = np.arange(total) / SAMPLE_RATE
        f0 = f0 * (1.0 + VIBRATO_EXTENT * spec.vibrato_depth
                   * np.sin(2.0 * np.pi * VIBRATO_RATE_HZ * t))

    phase = 2.0 * np.pi * np.cumsum(f0) / SAMPLE_RATE
    periodic = np.zeros(total)
    for k in range(1, N_HARMONICS + 1):
        alias_free = (k * f0) < MAX_HARMONIC_HZ
        periodic += (np.sin(k * phase) / k) * alias_free

    rng = np.random.default_rng(np.random.SeedSequence([int(spec.seed) & 0xFFFFFFFF, 0xA0D10]))
    noise = rng.standard_normal(total)
    if total > 64:
        sos = butter(4, NOISE_HIGHPASS_HZ / (SAMPLE_RATE / 2), "high", output="sos")
        noise = sosfiltfilt(sos, noise)
    periodic /= max(_rms(periodic), 1e-9)
    noise /= max(_rms(noise), 1e-9)
    ap = spec.aperiodicity
    excitation = np.sqrt(1.0 - ap) * periodic + np.sqrt(ap) * noise

    out = np.zeros(total)
    bounds = [int(round(i * total / n)) for i in range(n + 1)]
    fade = int(EDGE_FADE_S * SAMPLE_RATE)
    symbols = phonemes.symbols
    for i, sym in enumerate(symbols):
        lo, hi = bounds[i], bounds[i + 1]
        if hi <= lo or sym == BOUNDARY:
            continue
        seg = excitation[lo:hi].copy()
        for fc in FORMANTS[sym]:
            b, a = _resonator_coeffs(fc, max(60.0, 0.06 * fc))
            seg = lfilter(b, a, seg)
        seg /= max(_rms(seg), 1e-9)
        k = min(fade, len(seg) // 2)
        if k > 0:
            ramp = 0.5 - 0.5 * np.cos(np.linspace(0.0, np.pi, k))
            seg[:k] *= ramp
            seg[-k:] *= ramp[::-1]
        out[lo:hi] = seg

    peak = np.max(np.abs(out))
    if peak > 0:
        out = out / peak * spec.amplitude
    return out
