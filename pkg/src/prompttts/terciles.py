"""Proportional low/normal/high categorization for continuous style factors."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

CATEGORIES = ("low", "normal", "high")


def tercile_sizes(n: int) -> tuple[int, int, int]:
    """Group sizes with remainders going to the later categories in order."""
    base = n // 3
    rem = n % 3
    # rem 1 -> high gets the extra; rem 2 -> normal and high
    return base, base + (1 if rem == 2 else 0), base + (1 if rem >= 1 else 0)


def categorize_by_proportion(values) -> dict:
    """Map each id to low/normal/high by ascending thirds.

    ``values`` is a sequence of (id, float). Sorting is ascending with a
    stable tie-break on id; the bottom third is "low", the middle "normal",
    the top "high", with remainders per :func:`tercile_sizes`.
    """
    items = list(values)
    if not items:
        raise ValueError("cannot categorize an empty list")
    order = sorted(items, key=lambda kv: (float(kv[1]), kv[0]))
    n_low, n_norm, _ = tercile_sizes(len(order))
    out = {}
    for rank, (key, _) in enumerate(order):
        if rank < n_low:
            out[key] = "low"
        elif rank < n_low + n_norm:
            out[key] = "normal"
        else:
            out[key] = "high"
    return out


def tercile_thresholds(values) -> tuple[float, float]:
    """Boundary VALUES (low|normal, normal|high) implied by the rank split.

    Each boundary is the midpoint between the last value of one group and the
    first value of the next, so applying the thresholds to the fitting data
    reproduces the rank-based categories when no exact tie straddles a cut.
    """
    vals = sorted(float(v) for v in values)
    if not vals:
        raise ValueError("cannot derive thresholds from an empty list")
    n_low, n_norm, _ = tercile_sizes(len(vals))
    if n_low == 0:
        return vals[0], vals[0]
    b1 = 0.5 * (vals[n_low - 1] + vals[n_low])
    b2 = 0.5 * (vals[n_low + n_norm - 1] + vals[n_low + n_norm])
    return b1, b2


def apply_thresholds(value: float, thresholds: tuple[float, float]) -> str:
    b1, b2 = thresholds
    if value <= b1:
        return "low"
    if value <= b2:
        return "normal"
    return "high"


class TercileCategorizer(BaseEstimator, TransformerMixin):
    """Freeze tercile boundaries on training data, then bucket new values.

    fit() learns the two boundary values from the training measurements;
    transform() maps measurements to "low"/"normal"/"high" using those frozen
    values rather than re-ranking the new data.
    """

    def __init__(self):
        self.thresholds_ = None

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64).ravel()
        if X.size == 0:
            raise ValueError("cannot fit on an empty array")
        self.thresholds_ = tercile_thresholds(X)
        return self

    def transform(self, X):
        if self.thresholds_ is None:
            raise NotFittedError("TercileCategorizer must be fitted before transform")
        X = np.asarray(X, dtype=np.float64).ravel()
        return np.array([apply_thresholds(v, self.thresholds_) for v in X])
