"""Text frontend: prompt splitting, style-prompt tokenization, and grapheme-to-phoneme."""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

CLS_TOKEN = "[CLS]"
UNK_TOKEN = "[UNK]"
BOUNDARY = "|"

# Closed phoneme inventory (ARPAbet-style plus a word-boundary marker).
PHONEMES = (
    BOUNDARY,
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH",
    "EH", "ER", "EY", "F", "G", "HH", "IH", "IY", "JH", "K",
    "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH",
    "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH",
)
PHONEME_TO_ID = {p: i for i, p in enumerate(PHONEMES)}

# Deterministic per-letter expansion for out-of-lexicon words.
LETTER_FALLBACK = {
    "a": ("AE",), "b": ("B",), "c": ("K",), "d": ("D",), "e": ("EH",),
    "f": ("F",), "g": ("G",), "h": ("HH",), "i": ("IH",), "j": ("JH",),
    "k": ("K",), "l": ("L",), "m": ("M",), "n": ("N",), "o": ("OW",),
    "p": ("P",), "q": ("K",), "r": ("R",), "s": ("S",), "t": ("T",),
    "u": ("AH",), "v": ("V",), "w": ("W",), "x": ("K", "S"), "y": ("Y",),
    "z": ("Z",),
}

_WORD_RE = re.compile(r"[a-z']+")


@dataclass(frozen=True)
class TokenSeq:
    """Vocabulary ids for a style prompt; position 0 is always [CLS]."""

    ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class PhonemeSeq:
    """Phoneme ids for a content prompt."""

    ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(PHONEMES[i] for i in self.ids)

    @classmethod
    def from_symbols(cls, symbols) -> "PhonemeSeq":
        return cls(tuple(PHONEME_TO_ID[s] for s in symbols))


def split_prompt(full_prompt: str) -> tuple[str, str]:
    """Split a full prompt at the first colon into (style, content)."""
    if ":" not in full_prompt:
        raise ValueError("missing colon separator")
    style, content = full_prompt.split(":", 1)
    style, content = style.strip(), content.strip()
    if not style:
        raise ValueError("empty style prompt")
    if not content:
        raise ValueError("empty content prompt")
    return style, content


def normalize_words(text: str) -> list[str]:
    """Lowercase, drop punctuation, split on whitespace."""
    return _WORD_RE.findall(text.lower())


def _data_path(name: str) -> Path:
    return Path(resources.files("prompttts").joinpath("data", name))


class Vocabulary:
    """Closed word-level vocabulary for style prompts."""

    def __init__(self, words):
        self.words = [CLS_TOKEN, UNK_TOKEN] + [w for w in words if w not in (CLS_TOKEN, UNK_TOKEN)]
        self._index = {w: i for i, w in enumerate(self.words)}
        self.cls_id = self._index[CLS_TOKEN]
        self.unk_id = self._index[UNK_TOKEN]

    def __len__(self) -> int:
        return len(self.words)

    def id(self, word: str) -> int:
        return self._index.get(word, self.unk_id)

    def word(self, idx: int) -> str:
        return self.words[idx]

    @classmethod
    def load(cls, path=None) -> "Vocabulary":
        path = path or _data_path("vocab.txt")
        words = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()
                 if line.strip() and not line.startswith("#")]
        return cls(words)


def tokenize_prompt(style_prompt: str, vocab: Vocabulary) -> TokenSeq:
    """Word-level token ids with a [CLS] prepended; unknown words map to [UNK]."""
    words = normalize_words(style_prompt)
    if not words:
        raise ValueError("style prompt is empty after normalization")
    return TokenSeq((vocab.cls_id,) + tuple(vocab.id(w) for w in words))


class Lexicon:
    """Word -> phoneme-string map with a deterministic letter-level fallback."""

    def __init__(self, entries: dict[str, tuple[str, ...]]):
        for word, phones in entries.items():
            for p in phones:
                if p not in PHONEME_TO_ID:
                    raise ValueError(f"lexicon entry {word!r} uses unknown phoneme {p!r}")
        self.entries = dict(entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def pronounce(self, word: str) -> tuple[str, ...]:
        word = word.lower()
        if word in self.entries:
            return self.entries[word]
        out: list[str] = []
        for ch in word:
            out.extend(LETTER_FALLBACK.get(ch, ()))
        if not out:
            raise ValueError(f"cannot pronounce {word!r}")
        return tuple(out)

    @classmethod
    def load(cls, path=None) -> "Lexicon":
        path = path or _data_path("lexicon.txt")
        entries = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, *phones = line.split()
            entries[word.lower()] = tuple(phones)
        return cls(entries)


def g2p(content_prompt: str, lexicon: Lexicon) -> PhonemeSeq:
    """Phoneme ids for a content prompt, word boundaries marked with '|'."""
    words = normalize_words(content_prompt)
    if not words:
        raise ValueError("content prompt is empty after normalization")
    symbols: list[str] = []
    for i, word in enumerate(words):
        if i > 0:
            symbols.append(BOUNDARY)
        symbols.extend(lexicon.pronounce(word))
    return PhonemeSeq.from_symbols(symbols)
