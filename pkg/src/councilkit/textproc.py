"""Tokenization and n-gram extraction shared by indexing and analytics."""

from __future__ import annotations

import re
from typing import Iterable

from .errors import InvalidN
from .stem import stem

# Maximal runs of Unicode letters and digits; everything else separates.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Split *text* into lowercase tokens. Digits count as tokens."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Like tokenize() but keeps each token's (start, end) offsets in *text*."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def stem_tokens(tokens: Iterable[str]) -> list[str]:
    return [stem(t) for t in tokens]


def ngrams(tokens: list[str], n: int) -> list[str]:
    """All contiguous space-joined windows of length *n*, in order."""
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    if n == 1:
        return list(tokens)
    return [" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]
