"""Tokenization and trigram similarity shared by the blocking pipelines."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, asdict
from functools import lru_cache

from ..model import Value

DEFAULT_DELIMITERS = r"[\W_]+"
_SCHEME = re.compile(r"^https?://", re.IGNORECASE)
_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class TokenizerConfig:
    """How values are cut into blocking tokens.

    ``delimiters`` is a regular expression matching separator runs; the
    default splits on anything that is not a letter or digit.
    """

    delimiters: str = DEFAULT_DELIMITERS
    case_fold: bool = True
    min_token_length: int = 1
    tokenize_resource_values: bool = True
    _pattern: re.Pattern = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")
        object.__setattr__(self, "_pattern", _compile(self.delimiters))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("_pattern")
        return d


@lru_cache(maxsize=32)
def _compile(pattern: str) -> re.Pattern:
    return re.compile(pattern)


def tokenize_text(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    if config.case_fold:
        text = text.casefold()
    return [t for t in config._pattern.split(text) if len(t) >= config.min_token_length]


def tokenize(value: Value | str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Split a value into tokens, in order of appearance (duplicates kept).

    Resource values lose their http(s) scheme first, or yield nothing when
    ``tokenize_resource_values`` is off. Plain strings are treated as literals.
    """
    if isinstance(value, str):
        return tokenize_text(value, config)
    text = value.text
    if value.is_resource:
        if not config.tokenize_resource_values:
            return []
        text = _SCHEME.sub("", text)
    return tokenize_text(text, config)


def normalize(text: str) -> str:
    return _WS.sub(" ", text.casefold()).strip()


def trigrams(text: str) -> frozenset[str]:
    """Character 3-grams of the case-folded, whitespace-collapsed text."""
    text = normalize(text)
    if len(text) < 3:
        return frozenset((text,)) if text else frozenset()
    return frozenset(text[i:i + 3] for i in range(len(text) - 2))


def jaccard(a: frozenset | set, b: frozenset | set) -> float:
    if not a and not b:
        return 0.0
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter)
