"""Tokenization, display-width accounting, and profanity starring.

English, Spanish and Portuguese tokenize on whitespace; Chinese is one
token per non-whitespace character. Chinese characters occupy two display
cells, everything else one.
"""

from __future__ import annotations

from typing import Iterable, List, Set

from .types import check_language


def tokenize(lang: str, text: str) -> List[str]:
    """Split text into display tokens for the given language."""
    check_language(lang)
    if lang == "zh":
        return [ch for ch in text if not ch.isspace()]
    return text.split()


def join_tokens(lang: str, tokens: Iterable[str]) -> str:
    """Reassemble tokens into normalized display text."""
    check_language(lang)
    sep = "" if lang == "zh" else " "
    return sep.join(tokens)


def token_width(lang: str, token: str) -> int:
    """Display cells occupied by one token (zh characters count 2)."""
    if lang == "zh":
        return 2 * len(token)
    return len(token)


def star_token(token: str) -> str:
    """Replace a profane token: first character kept, rest starred."""
    if not token:
        return token
    return token[0] + "*" * (len(token) - 1)


def filter_profanity(tokens: List[str], lexicon: Set[str]) -> List[str]:
    """Star every token whose case-folded form is in the lexicon.

    Lexicon entries must be lowercase. Applied identically to transcript
    and translation token streams.
    """
    if not lexicon:
        return list(tokens)
    return [star_token(t) if t.casefold() in lexicon else t for t in tokens]


def lcp_len(a, b) -> int:
    """Length of the longest common prefix of two token sequences."""
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n
