"""Categorical style factors and their fixed category sets."""
from __future__ import annotations

from dataclasses import dataclass, fields

GENDERS = ("male", "female")
LEVELS = ("low", "normal", "high")
EMOTIONS = ("general", "shout", "whisper", "cheerful", "sad")

# Category sets per factor, in enum order (index == label id).
FACTOR_CATEGORIES = {
    "gender": GENDERS,
    "pitch": LEVELS,
    "speed": LEVELS,
    "volume": LEVELS,
    "emotion": EMOTIONS,
}

FACTOR_NAMES = tuple(FACTOR_CATEGORIES)
TERCILE_FACTORS = ("pitch", "speed", "volume")


@dataclass(frozen=True)
class StyleFactors:
    """One categorical label per style factor.

    ``emotion`` may be None only for 4-factor ("real"-style) corpora.
    """

    gender: str
    pitch: str
    speed: str
    volume: str
    emotion: str | None = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "emotion" and value is None:
                continue
            allowed = FACTOR_CATEGORIES[f.name]
            if value not in allowed:
                raise ValueError(
                    f"invalid {f.name} category {value!r}; expected one of {allowed}"
                )

    @property
    def names(self) -> tuple[str, ...]:
        """Factor names present on this tuple (4 or 5)."""
        if self.emotion is None:
            return FACTOR_NAMES[:-1]
        return FACTOR_NAMES

    def as_dict(self) -> dict[str, str]:
        return {name: getattr(self, name) for name in self.names}

    def replace(self, **kwargs) -> "StyleFactors":
        merged = {name: getattr(self, name) for name in FACTOR_NAMES}
        merged.update(kwargs)
        return StyleFactors(**merged)


def all_factor_tuples(with_emotion: bool = True) -> list[StyleFactors]:
    """Full category product, in deterministic order."""
    out = []
    emotions = EMOTIONS if with_emotion else (None,)
    for g in GENDERS:
        for p in LEVELS:
            for s in LEVELS:
                for v in LEVELS:
                    for e in emotions:
                        out.append(StyleFactors(g, p, s, v, e))
    return out
