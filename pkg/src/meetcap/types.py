"""Core value types shared across the captioning pipeline.

All timestamps are integer milliseconds on a per-session clock.
Token lists are plain lists of strings; see meetcap.text for the
per-language tokenization rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Optional

SUPPORTED_LANGUAGES = ("en", "zh", "es", "pt")


class UnsupportedLanguageError(ValueError):
    """Raised when a language code outside the supported set is used."""


def check_language(code: str) -> str:
    """Validate a language code, returning it unchanged."""
    if code not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguageError(
            f"unsupported language {code!r}; expected one of {SUPPORTED_LANGUAGES}"
        )
    return code


@dataclass(frozen=True)
class TranscriptEvent:
    """One incremental ASR hypothesis (partial or final) for an utterance.

    seq strictly increases within an utterance; exactly one event per
    utterance is final, with the maximal seq. speech_start_ms marks the
    onset of the utterance's audio and is constant across its events.
    """

    session_id: str
    speaker_id: str
    utterance_id: str
    seq: int
    timestamp_ms: int
    speech_start_ms: int
    text: str
    is_final: bool

    def __post_init__(self):
        if self.seq < 0:
            raise ValueError("seq must be >= 0")
        if self.speech_start_ms > self.timestamp_ms:
            raise ValueError("speech_start_ms must be <= timestamp_ms")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TranscriptEvent":
        return cls(
            session_id=d["session_id"],
            speaker_id=d["speaker_id"],
            utterance_id=d["utterance_id"],
            seq=int(d["seq"]),
            timestamp_ms=int(d["timestamp_ms"]),
            speech_start_ms=int(d["speech_start_ms"]),
            text=d["text"],
            is_final=bool(d["is_final"]),
        )


@dataclass(frozen=True)
class PolicyConfig:
    """Captioning knobs.

    translate_k: send every kth ASR output to MT.
    translate_t_ms: minimum gap between MT calls.
    mask_k: suppress the last k tokens of MT output; mask_ramp grows the
    mask from 0 at utterance start so the first caption appears at once.
    """

    translate_k: int = 1
    translate_t_ms: int = 0
    mask_k: int = 4
    mask_ramp: bool = True
    bias_enabled: bool = True
    window_lines: int = 3
    window_cols: int = 60
    profanity_enabled: bool = True

    def __post_init__(self):
        if self.translate_k < 1:
            raise ValueError("translate_k must be >= 1")
        if self.translate_t_ms < 0:
            raise ValueError("translate_t_ms must be >= 0")
        if self.mask_k < 0:
            raise ValueError("mask_k must be >= 0")
        if self.window_lines < 1:
            raise ValueError("window_lines must be >= 1")
        if self.window_cols < 1:
            raise ValueError("window_cols must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyConfig":
        return cls(**d)


@dataclass(frozen=True)
class CaptionUpdate:
    """One displayed-translation revision for (utterance, target language).

    tokens is the full displayed translation (post-mask, pre-window);
    lines is the window-fitted rendering. Tokens beyond stable_prefix_len
    may still change and should be rendered faded.
    """

    utterance_id: str
    speaker_id: str
    target_lang: str
    update_seq: int
    timestamp_ms: int
    tokens: tuple
    stable_prefix_len: int
    lines: tuple
    line_ids: tuple
    is_final: bool

    def __post_init__(self):
        if not 0 <= self.stable_prefix_len <= len(self.tokens):
            raise ValueError("stable_prefix_len out of range")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tokens"] = list(self.tokens)
        d["lines"] = list(self.lines)
        d["line_ids"] = list(self.line_ids)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CaptionUpdate":
        return cls(
            utterance_id=d["utterance_id"],
            speaker_id=d["speaker_id"],
            target_lang=d["target_lang"],
            update_seq=int(d["update_seq"]),
            timestamp_ms=int(d["timestamp_ms"]),
            tokens=tuple(d["tokens"]),
            stable_prefix_len=int(d["stable_prefix_len"]),
            lines=tuple(d["lines"]),
            line_ids=tuple(d["line_ids"]),
            is_final=bool(d["is_final"]),
        )
