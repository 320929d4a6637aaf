"""Streaming caption core: transcript events in, caption updates out.

Pure state machine, no I/O. One CaptionPipeline handles one speaker
stream into one target language; Captioner fans a stream out to several
target languages. Callers must feed each utterance's events in seq order;
distinct sessions use independent instances.

Stabilization policy: translate-k / translate-t gate MT calls, mask-k
(with a ramp from mask-0 at utterance start) suppresses the unstable
tail, and when bias is enabled the previous MT output is passed back to
the backend so acceptable-but-different re-translations don't churn the
display. Finals bypass both gates and the mask, so the final caption is
always the unmasked translation of the final transcript.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .backends import MTBackend, MTRequest, TranslateError
from .text import filter_profanity, join_tokens, lcp_len, token_width, tokenize
from .types import CaptionUpdate, PolicyConfig, TranscriptEvent

logger = logging.getLogger(__name__)

# A line-start position: (token index, character offset within token).
# Offset > 0 only occurs when a token wider than the window is hard-split.
Break = Tuple[int, int]


def should_call_mt(
    policy: PolicyConfig,
    asr_event_count: int,
    last_mt_call_ms: Optional[int],
    event: TranscriptEvent,
) -> bool:
    """Decide whether this ASR event triggers an MT call.

    asr_event_count counts events seen before this one; every event
    counts toward translate-k whether or not it was gated out. Finals
    always translate.
    """
    if event.is_final:
        return True
    if asr_event_count % policy.translate_k != 0:
        return False
    if last_mt_call_ms is not None and (
        event.timestamp_ms - last_mt_call_ms < policy.translate_t_ms
    ):
        return False
    return True


def effective_mask(policy: PolicyConfig, mt_calls_so_far: int, is_final: bool) -> int:
    """Mask size for the next caption: 0 on finals, ramped otherwise."""
    if is_final:
        return 0
    if policy.mask_ramp:
        return min(policy.mask_k, mt_calls_so_far)
    return policy.mask_k


def apply_mask(tokens: List[str], k: int, bias_enabled: bool) -> Tuple[List[str], int]:
    """Suppress the last k tokens; the rest is the stable prefix when the
    backend honors the bias contract."""
    displayed = list(tokens[: max(0, len(tokens) - k)]) if k else list(tokens)
    stable = len(displayed) if bias_enabled else 0
    return displayed, stable


def _line_id(start: Break, content: str) -> str:
    h = hashlib.md5(f"{start[0]}:{start[1]}|{content}".encode("utf-8")).hexdigest()
    return h[:10]


def _slice(tokens: List[str], lang: str, a: Break, b: Break) -> str:
    parts: List[str] = []
    j, o = a
    while j < b[0] and j < len(tokens):
        parts.append(tokens[j][o:])
        j += 1
        o = 0
    if j == b[0] and j < len(tokens) and b[1] > o:
        parts.append(tokens[j][o:b[1]])
    return join_tokens(lang, parts)


def render_window(
    tokens: List[str],
    prev_tokens: List[str],
    prev_breaks: List[Break],
    window_lines: int,
    window_cols: int,
    lang: str,
) -> Tuple[List[str], List[str], List[Break]]:
    """Wrap tokens into the caption window.

    Greedy wrap at <= window_cols cells per line; en/es/pt break at token
    boundaries, zh (single-character tokens) anywhere; zh characters
    count 2 cells. Line breaks already committed inside the prefix shared
    with the previous rendering are reused verbatim so words don't jump
    across lines. A single token wider than the window is hard-split at
    the column limit. Only the last window_lines lines are displayed.
    Returns (lines, line_ids, all_breaks).
    """
    if not tokens:
        return [], [], []

    lcp = lcp_len(tokens, prev_tokens)
    breaks: List[Break] = [(0, 0)]
    for b in prev_breaks:
        if b == (0, 0):
            continue
        if b[0] < lcp or (b[0] == lcp and b[1] == 0):
            breaks.append(b)

    joiner_w = 0 if lang == "zh" else 1
    i, off = breaks[-1]
    used = 0  # cells already placed on the open line
    while i < len(tokens):
        piece = tokens[i][off:]
        w = token_width(lang, piece)
        gap = joiner_w if used else 0
        if used + gap + w <= window_cols:
            used += gap + w
            i += 1
            off = 0
        elif used:
            breaks.append((i, off))
            used = 0
        else:
            # Empty line and the token still doesn't fit: hard-split.
            per_char = 2 if lang == "zh" else 1
            nchars = max(1, window_cols // per_char)
            off += min(nchars, len(piece))
            if off >= len(tokens[i]):
                i += 1
                off = 0
            if i < len(tokens):
                breaks.append((i, off))
            used = 0

    ends = breaks[1:] + [(len(tokens), 0)]
    lines = [_slice(tokens, lang, a, b) for a, b in zip(breaks, ends)]
    ids = [_line_id(b, line) for b, line in zip(breaks, lines)]
    if len(lines) > window_lines:
        lines = lines[-window_lines:]
        ids = ids[-window_lines:]
    return lines, ids, breaks


@dataclass
class _UtteranceState:
    asr_event_count: int = 0
    mt_calls: int = 0
    last_mt_call_ms: Optional[int] = None
    prev_mt_tokens: List[str] = field(default_factory=list)
    prev_displayed: Optional[List[str]] = None
    prev_breaks: List[Break] = field(default_factory=list)
    update_seq: int = 0
    last_seq: int = -1
    finalized: bool = False


class CaptionPipeline:
    """Captioning state for one speaker stream into one target language."""

    def __init__(
        self,
        source_lang: str,
        target_lang: str,
        policy: PolicyConfig,
        backend: MTBackend,
        profanity_lexicon: Optional[Set[str]] = None,
        postprocess=None,
    ):
        self.source_lang = source_lang
        self.target_lang = target_lang
        self.policy = policy
        self.backend = backend
        self.profanity_lexicon = profanity_lexicon or set()
        # Hook for punctuation/truecasing; identity by default.
        self.postprocess = postprocess or (lambda tokens: tokens)
        self._utterances: Dict[str, _UtteranceState] = {}
        self.final_cache: Dict[str, List[str]] = {}

    def _state(self, utterance_id: str) -> _UtteranceState:
        return self._utterances.setdefault(utterance_id, _UtteranceState())

    def process_event(self, event: TranscriptEvent) -> Optional[CaptionUpdate]:
        """Feed one ASR event; return the caption update, if any."""
        st = self._state(event.utterance_id)
        if st.finalized:
            logger.warning(
                "event for finalized utterance %s dropped", event.utterance_id
            )
            return None
        if event.seq <= st.last_seq:
            logger.warning(
                "out-of-order seq %d for utterance %s dropped",
                event.seq,
                event.utterance_id,
            )
            return None
        st.last_seq = event.seq

        call = should_call_mt(self.policy, st.asr_event_count, st.last_mt_call_ms, event)
        st.asr_event_count += 1
        if not call:
            return None

        bias_text = None
        if self.policy.bias_enabled and st.prev_mt_tokens:
            bias_text = join_tokens(self.target_lang, st.prev_mt_tokens)
        req = MTRequest(
            source_lang=self.source_lang,
            target_lang=self.target_lang,
            source_text=event.text,
            bias_text=bias_text,
        )
        try:
            result = self.backend.translate(req)
        except TranslateError as e:
            logger.error(
                "MT backend failed for utterance %s: %s", event.utterance_id, e
            )
            return None

        mask = effective_mask(self.policy, st.mt_calls, event.is_final)
        st.mt_calls += 1
        st.last_mt_call_ms = event.timestamp_ms

        mt_tokens = self.postprocess(list(result.tokens))
        displayed, stable = apply_mask(mt_tokens, mask, self.policy.bias_enabled)
        if self.policy.profanity_enabled and self.profanity_lexicon:
            displayed = filter_profanity(displayed, self.profanity_lexicon)

        update: Optional[CaptionUpdate] = None
        if event.is_final or displayed != st.prev_displayed:
            lines, line_ids, breaks = render_window(
                displayed,
                st.prev_displayed or [],
                st.prev_breaks,
                self.policy.window_lines,
                self.policy.window_cols,
                self.target_lang,
            )
            update = CaptionUpdate(
                utterance_id=event.utterance_id,
                speaker_id=event.speaker_id,
                target_lang=self.target_lang,
                update_seq=st.update_seq,
                timestamp_ms=event.timestamp_ms,
                tokens=tuple(displayed),
                stable_prefix_len=stable,
                lines=tuple(lines),
                line_ids=tuple(line_ids),
                is_final=event.is_final,
            )
            st.update_seq += 1
            st.prev_displayed = displayed
            st.prev_breaks = breaks

        st.prev_mt_tokens = mt_tokens
        if event.is_final:
            st.finalized = True
            self.final_cache[event.utterance_id] = displayed
        return update


class Captioner:
    """Fans one transcript stream out to several target languages."""

    def __init__(
        self,
        source_lang: str,
        policy: PolicyConfig,
        backend: MTBackend,
        target_langs=(),
        profanity_lexicon: Optional[Set[str]] = None,
    ):
        self.source_lang = source_lang
        self.policy = policy
        self.backend = backend
        self.profanity_lexicon = profanity_lexicon
        self.pipelines: Dict[str, CaptionPipeline] = {}
        for lang in target_langs:
            self.register_target(lang)

    def register_target(self, lang: str) -> CaptionPipeline:
        if lang not in self.pipelines:
            self.pipelines[lang] = CaptionPipeline(
                self.source_lang,
                lang,
                self.policy,
                self.backend,
                self.profanity_lexicon,
            )
        return self.pipelines[lang]

    def process_event(self, event: TranscriptEvent) -> List[CaptionUpdate]:
        updates = []
        for pipeline in self.pipelines.values():
            u = pipeline.process_event(event)
            if u is not None:
                updates.append(u)
        return updates
