"""Input validation helpers shared across the public API."""
from __future__ import annotations

import numpy as np


def check_waveform(w, name: str = "waveform") -> np.ndarray:
    """Coerce to a finite float64 1-D array in [-1, 1]-ish range."""
    arr = np.asarray(w, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite samples")
    return arr


def check_mel(m, n_mels: int = 80, name: str = "mel") -> np.ndarray:
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != n_mels:
        raise ValueError(f"{name} must have shape (frames, {n_mels}), got {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError(f"{name} has no frames")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    return value


def check_unit_interval(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return value
