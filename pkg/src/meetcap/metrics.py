"""Evaluation suite for caption streams.

All metrics are computed from the sequence of captions a viewer would
see: the post-mask token stream of each utterance, with timestamps.
Columns follow the standard report order: final bleu, translation lag,
normalized erasure, initial lag, incremental caption lag, mean and max
word burstiness; WER/CER over the source transcripts ride along.

Aggregation choices that the literature leaves open are recorded in the
report metadata: erasure is pooled as a corpus micro-ratio (a macro mean
is also emitted), burstiness counts churn (tokens removed plus added),
and single-update utterances contribute 0 to incremental caption lag.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Sequence, Tuple

from .text import join_tokens, lcp_len
from .types import CaptionUpdate, TranscriptEvent

REPORT_COLUMNS = (
    "final bleu",
    "translation lag (s)",
    "normalized erasure",
    "initial lag (s)",
    "incremental caption lag (s)",
    "mean word burstiness",
    "max word burstiness",
)

REPORT_METADATA = {
    "erasure_aggregation": "micro (corpus sum m / corpus sum n)",
    "burstiness_definition": "churn (tokens removed + tokens added per update)",
    "incremental_lag_single_update": "contributes 0, not skipped",
}


@dataclass
class UtteranceLog:
    """The caption history of one (utterance, target language)."""

    utterance_id: str
    target_lang: str
    speech_start_ms: int
    speech_end_ms: int
    updates: List[Tuple[int, List[str]]]  # (timestamp_ms, tokens)
    final_tokens: List[str]

    def validate(self) -> None:
        if self.updates and list(self.updates[-1][1]) != list(self.final_tokens):
            raise ValueError(
                f"utterance {self.utterance_id}: last update != final tokens"
            )
        times = [t for t, _ in self.updates]
        if times != sorted(times):
            raise ValueError(f"utterance {self.utterance_id}: timestamps decrease")


@dataclass
class MetricsReport:
    final_bleu: float
    translation_lag_s: float
    normalized_erasure: float
    initial_lag_s: float
    incremental_caption_lag_s: float
    mean_word_burstiness: float
    max_word_burstiness: float
    wer: float
    cer: float
    utterance_count: int
    normalized_erasure_macro: float = 0.0
    metadata: Dict[str, str] = field(default_factory=lambda: dict(REPORT_METADATA))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, ensure_ascii=False)

    def to_table(self) -> str:
        """Aligned plain-text table in the standard column order."""
        values = [
            f"{self.final_bleu:.2f}",
            f"{self.translation_lag_s:.2f}",
            f"{self.normalized_erasure:.2f}",
            f"{self.initial_lag_s:.2f}",
            f"{self.incremental_caption_lag_s:.2f}",
            f"{self.mean_word_burstiness:.2f}",
            f"{self.max_word_burstiness:.2f}",
        ]
        widths = [max(len(h), len(v)) for h, v in zip(REPORT_COLUMNS, values)]
        header = " | ".join(h.ljust(w) for h, w in zip(REPORT_COLUMNS, widths))
        row = " | ".join(v.rjust(w) for v, w in zip(values, widths))
        extra = f"wer: {self.wer:.4f}  cer: {self.cer:.4f}  utterances: {self.utterance_count}"
        return "\n".join([header, "-" * len(header), row, extra])


def erasure(log: UtteranceLog) -> Tuple[int, int]:
    """Tokens erased by revisions (m) and final length (n)."""
    m = 0
    for (_, prev), (_, cur) in zip(log.updates, log.updates[1:]):
        m += len(prev) - lcp_len(prev, cur)
    return m, len(log.final_tokens)


def burstiness(log: UtteranceLog) -> Tuple[float, float]:
    """Per-utterance mean and max churn per caption update."""
    bs: List[int] = []
    for i, (_, cur) in enumerate(log.updates):
        if i == 0:
            bs.append(len(cur))
        else:
            prev = log.updates[i - 1][1]
            l = lcp_len(prev, cur)
            bs.append((len(prev) - l) + (len(cur) - l))
    if not bs:
        return 0.0, 0.0
    return sum(bs) / len(bs), float(max(bs))


def lags(log: UtteranceLog) -> Tuple[float, float, float]:
    """(initial lag, incremental caption lag, translation lag), seconds.

    Translation lag aligns target token j to spoken time
    speech_start + (j - 0.5)/n * span and measures until the earliest
    update from which the j-prefix never changes again; per-token lag is
    floored at 0.
    """
    if not log.updates:
        return 0.0, 0.0, 0.0
    t1 = log.updates[0][0]
    initial = (t1 - log.speech_start_ms) / 1000.0

    if len(log.updates) < 2:
        incremental = 0.0
    else:
        gaps = [
            (b[0] - a[0]) / 1000.0 for a, b in zip(log.updates, log.updates[1:])
        ]
        incremental = sum(gaps) / len(gaps)

    n = len(log.final_tokens)
    if n == 0:
        return initial, incremental, 0.0
    span = log.speech_end_ms - log.speech_start_ms
    total = 0.0
    for j in range(1, n + 1):
        f_j = None
        for i in range(len(log.updates)):
            stable = all(
                len(tok) >= j and list(tok[:j]) == list(log.final_tokens[:j])
                for _, tok in log.updates[i:]
            )
            if stable:
                f_j = log.updates[i][0]
                break
        assert f_j is not None  # the final update always satisfies the prefix
        s_j = log.speech_start_ms + (j - 0.5) / n * span
        total += max(0.0, (f_j - s_j) / 1000.0)
    return initial, incremental, total / n


_WORD_RE = re.compile(r"[\w]+|[^\w\s]", re.UNICODE)


def bleu_tokenize(lang: str, text: str) -> List[str]:
    """BLEU-side tokenization: zh at character level, others case-folded
    words with punctuation split off."""
    if lang == "zh":
        return [ch for ch in text if not ch.isspace()]
    return _WORD_RE.findall(text.casefold())


def corpus_bleu(
    hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]]
) -> float:
    """Corpus BLEU-4: modified n-gram precisions pooled over the corpus,
    geometric mean, brevity penalty, scaled to [0, 100].

    Sharp edge: a zero pooled match count for any order yields 0.0.
    """
    if len(hypotheses) != len(references):
        raise ValueError("hypothesis/reference counts differ")
    if not hypotheses:
        raise ValueError("empty corpus")
    matched = [0] * 4
    totals = [0] * 4
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp = list(hyp)
        ref = list(ref)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for order in range(1, 5):
            hyp_ngrams = Counter(
                tuple(hyp[i : i + order]) for i in range(len(hyp) - order + 1)
            )
            ref_ngrams = Counter(
                tuple(ref[i : i + order]) for i in range(len(ref) - order + 1)
            )
            totals[order - 1] += sum(hyp_ngrams.values())
            matched[order - 1] += sum(
                min(c, ref_ngrams[g]) for g, c in hyp_ngrams.items()
            )
    if any(t == 0 for t in totals) or any(m == 0 for m in matched):
        return 0.0
    log_precision = sum(math.log(m / t) for m, t in zip(matched, totals)) / 4
    bp = 1.0 if hyp_len >= ref_len else math.exp(1 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_precision)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance, iterative two-row DP."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def edit_rate(hyp: Sequence[str], ref: Sequence[str]) -> float:
    """Levenshtein distance normalized by reference length."""
    if not ref:
        raise ValueError("empty reference")
    return levenshtein(list(hyp), list(ref)) / len(ref)


@dataclass(frozen=True)
class TranscriptPair:
    """Final ASR hypothesis and its reference, for WER/CER."""

    utterance_id: str
    lang: str
    hypothesis: str
    reference: str


class MissingReferenceError(KeyError):
    pass


def _wer_cer(transcripts: Optional[Sequence[TranscriptPair]]) -> Tuple[float, float]:
    if not transcripts:
        return 0.0, 0.0
    word_edits = word_ref = char_edits = char_ref = 0
    for pair in transcripts:
        ref_words = pair.reference.split()
        hyp_words = pair.hypothesis.split()
        if ref_words:
            word_edits += levenshtein(hyp_words, ref_words)
            word_ref += len(ref_words)
        ref_chars = [c for c in pair.reference if not c.isspace()]
        hyp_chars = [c for c in pair.hypothesis if not c.isspace()]
        if ref_chars:
            char_edits += levenshtein(hyp_chars, ref_chars)
            char_ref += len(ref_chars)
    wer = word_edits / word_ref if word_ref else 0.0
    cer = char_edits / char_ref if char_ref else 0.0
    return wer, cer


def evaluate_session(
    logs: Sequence[UtteranceLog],
    references: Dict[Tuple[str, str], str],
    transcripts: Optional[Sequence[TranscriptPair]] = None,
) -> MetricsReport:
    """Aggregate all metrics for one evaluated session.

    references maps (utterance_id, target_lang) to the reference
    translation text. Every log must have one.
    """
    if not logs:
        raise ValueError("no utterance logs to evaluate")
    hyps: List[List[str]] = []
    refs: List[List[str]] = []
    sum_m = sum_n = 0
    macro_ratios: List[float] = []
    mean_bs: List[float] = []
    max_bs: List[float] = []
    initials: List[float] = []
    incrementals: List[float] = []
    tls: List[float] = []
    for log in logs:
        log.validate()
        key = (log.utterance_id, log.target_lang)
        if key not in references:
            raise MissingReferenceError(
                f"no reference for utterance {log.utterance_id} ({log.target_lang})"
            )
        hyp_text = join_tokens(log.target_lang, log.final_tokens)
        hyps.append(bleu_tokenize(log.target_lang, hyp_text))
        refs.append(bleu_tokenize(log.target_lang, references[key]))

        m, n = erasure(log)
        sum_m += m
        sum_n += n
        if n > 0:
            macro_ratios.append(m / n)
        mb, xb = burstiness(log)
        mean_bs.append(mb)
        max_bs.append(xb)
        init, inc, tl = lags(log)
        initials.append(init)
        incrementals.append(inc)
        if n > 0:
            tls.append(tl)

    wer, cer = _wer_cer(transcripts)
    count = len(logs)
    return MetricsReport(
        final_bleu=corpus_bleu(hyps, refs),
        translation_lag_s=sum(tls) / len(tls) if tls else 0.0,
        normalized_erasure=sum_m / sum_n if sum_n else 0.0,
        initial_lag_s=sum(initials) / count,
        incremental_caption_lag_s=sum(incrementals) / count,
        mean_word_burstiness=sum(mean_bs) / count,
        max_word_burstiness=sum(max_bs) / count,
        wer=wer,
        cer=cer,
        utterance_count=count,
        normalized_erasure_macro=(
            sum(macro_ratios) / len(macro_ratios) if macro_ratios else 0.0
        ),
    )


@dataclass
class _StreamState:
    speech_start_ms: int = 0
    speech_end_ms: int = 0
    first_t: Optional[int] = None
    prev_t: Optional[int] = None
    prev_tokens: List[str] = field(default_factory=list)
    n_updates: int = 0
    gap_sum_ms: int = 0
    m: int = 0
    b_sum: int = 0
    b_max: int = 0
    finalize_ms: List[int] = field(default_factory=list)
    final_tokens: Optional[List[str]] = None


class StreamingEvaluator:
    """Computes the same metrics as evaluate_session, one update at a
    time, without retaining full caption histories."""

    def __init__(self):
        self._states: Dict[Tuple[str, str], _StreamState] = {}
        self._speech: Dict[str, Tuple[int, int]] = {}

    def observe_event(self, event: TranscriptEvent) -> None:
        self._speech[event.utterance_id] = (event.speech_start_ms, event.timestamp_ms)

    def observe_update(self, update: CaptionUpdate) -> None:
        key = (update.utterance_id, update.target_lang)
        st = self._states.setdefault(key, _StreamState())
        if update.utterance_id in self._speech:
            st.speech_start_ms, st.speech_end_ms = self._speech[update.utterance_id]
        tokens = list(update.tokens)
        t = update.timestamp_ms
        if st.n_updates == 0:
            st.first_t = t
            b = len(tokens)
        else:
            l = lcp_len(st.prev_tokens, tokens)
            st.m += len(st.prev_tokens) - l
            b = (len(st.prev_tokens) - l) + (len(tokens) - l)
            st.gap_sum_ms += t - st.prev_t
            del st.finalize_ms[l:]
        st.finalize_ms.extend([t] * (len(tokens) - len(st.finalize_ms)))
        st.b_sum += b
        st.b_max = max(st.b_max, b)
        st.n_updates += 1
        st.prev_tokens = tokens
        st.prev_t = t
        if update.is_final:
            st.final_tokens = tokens

    def report(
        self,
        references: Dict[Tuple[str, str], str],
        transcripts: Optional[Sequence[TranscriptPair]] = None,
    ) -> MetricsReport:
        if not self._states:
            raise ValueError("no caption updates observed")
        hyps: List[List[str]] = []
        refs: List[List[str]] = []
        sum_m = sum_n = 0
        macro_ratios: List[float] = []
        mean_bs: List[float] = []
        max_bs: List[float] = []
        initials: List[float] = []
        incrementals: List[float] = []
        tls: List[float] = []
        for (uid, lang), st in self._states.items():
            if uid in self._speech:
                st.speech_start_ms, st.speech_end_ms = self._speech[uid]
            if st.final_tokens is None:
                raise ValueError(f"utterance {uid} ({lang}) never finalized")
            if (uid, lang) not in references:
                raise MissingReferenceError(f"no reference for utterance {uid} ({lang})")
            hyp_text = join_tokens(lang, st.final_tokens)
            hyps.append(bleu_tokenize(lang, hyp_text))
            refs.append(bleu_tokenize(lang, references[(uid, lang)]))

            n = len(st.final_tokens)
            sum_m += st.m
            sum_n += n
            if n > 0:
                macro_ratios.append(st.m / n)
            mean_bs.append(st.b_sum / st.n_updates)
            max_bs.append(float(st.b_max))
            initials.append((st.first_t - st.speech_start_ms) / 1000.0)
            if st.n_updates >= 2:
                incrementals.append(st.gap_sum_ms / (st.n_updates - 1) / 1000.0)
            else:
                incrementals.append(0.0)
            if n > 0:
                span = st.speech_end_ms - st.speech_start_ms
                total = 0.0
                for j in range(1, n + 1):
                    s_j = st.speech_start_ms + (j - 0.5) / n * span
                    total += max(0.0, (st.finalize_ms[j - 1] - s_j) / 1000.0)
                tls.append(total / n)

        wer, cer = _wer_cer(transcripts)
        count = len(self._states)
        return MetricsReport(
            final_bleu=corpus_bleu(hyps, refs),
            translation_lag_s=sum(tls) / len(tls) if tls else 0.0,
            normalized_erasure=sum_m / sum_n if sum_n else 0.0,
            initial_lag_s=sum(initials) / count,
            incremental_caption_lag_s=sum(incrementals) / count,
            mean_word_burstiness=sum(mean_bs) / count,
            max_word_burstiness=sum(max_bs) / count,
            wer=wer,
            cer=cer,
            utterance_count=count,
            normalized_erasure_macro=(
                sum(macro_ratios) / len(macro_ratios) if macro_ratios else 0.0
            ),
        )
