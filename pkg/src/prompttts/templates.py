"""Style-prompt rendering from a human-editable template bank."""
from __future__ import annotations

from itertools import permutations
from pathlib import Path

import numpy as np

from prompttts.factors import StyleFactors
from prompttts.textfront import _data_path

NEUTRAL_KEY = "neutral"
_ADVERBIAL_ORDERS = list(permutations(("pitch", "speed", "volume")))


class TemplateBank:
    """Surface phrasings keyed by "factor.category" (plus a neutral verb set)."""

    def __init__(self, phrases: dict[str, list[str]]):
        for key, options in phrases.items():
            for text in options:
                if ":" in text:
                    raise ValueError(f"template {key!r} contains a colon: {text!r}")
        self.phrases = {k: list(v) for k, v in phrases.items()}

    def options(self, key: str) -> list[str]:
        if key not in self.phrases or not self.phrases[key]:
            raise ValueError(f"no templates for category {key!r}")
        return self.phrases[key]

    @classmethod
    def load(cls, path=None) -> "TemplateBank":
        path = path or _data_path("templates.txt")
        phrases: dict[str, list[str]] = {}
        section = None
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                phrases.setdefault(section, [])
            elif section is None:
                raise ValueError(f"template line outside any section: {line!r}")
            else:
                phrases[section].append(line)
        return cls(phrases)


def render_style_prompt(factors: StyleFactors, bank: TemplateBank,
                        rng: np.random.Generator) -> str:
    """One natural-language sentence mentioning every present factor once.

    Deterministic for a given rng state; never contains a colon.
    """
    subject = bank.options(f"gender.{factors.gender}")
    if factors.emotion is not None:
        verb = bank.options(f"emotion.{factors.emotion}")
    else:
        verb = bank.options(NEUTRAL_KEY)
    adverbials = {
        name: bank.options(f"{name}.{getattr(factors, name)}")
        for name in ("pitch", "speed", "volume")
    }

    pick = lambda options: options[int(rng.integers(len(options)))]
    order = _ADVERBIAL_ORDERS[int(rng.integers(len(_ADVERBIAL_ORDERS)))]
    parts = [pick(subject), pick(verb)] + [pick(adverbials[name]) for name in order]
    sentence = " ".join(parts)
    sentence = sentence[0].upper() + sentence[1:] + "."
    if ":" in sentence:
        raise ValueError(f"rendered prompt contains a colon: {sentence!r}")
    return sentence
