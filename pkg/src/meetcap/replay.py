"""Replay scripts: recorded incremental ASR streams plus references.

A replay script stands in for live speech recognition during evaluation.
On disk it is JSONL, one TranscriptEvent per line, with a parallel
references file of {"utterance_id", "target_lang", "reference"} lines.
Replays are deterministic in virtual-clock mode; realtime mode sleeps
until each event's timestamp.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .text import join_tokens
from .types import TranscriptEvent, check_language


class ReplayScriptError(ValueError):
    """Malformed replay script; message carries file/line context."""


@dataclass
class ReplayScript:
    events: List[TranscriptEvent]
    references: Dict[Tuple[str, str], str] = field(default_factory=dict)

    def validate(self) -> None:
        per_utt: Dict[str, List[TranscriptEvent]] = {}
        for ev in self.events:
            per_utt.setdefault(ev.utterance_id, []).append(ev)
        for uid, evs in per_utt.items():
            seqs = [e.seq for e in evs]
            if sorted(seqs) != seqs or len(set(seqs)) != len(seqs):
                raise ReplayScriptError(f"utterance {uid}: seq not strictly increasing")
            finals = [e for e in evs if e.is_final]
            if len(finals) != 1:
                raise ReplayScriptError(
                    f"utterance {uid}: expected exactly one final event, got {len(finals)}"
                )
            if finals[0].seq != max(seqs):
                raise ReplayScriptError(f"utterance {uid}: final event is not last")
            times = [e.timestamp_ms for e in evs]
            if times != sorted(times):
                raise ReplayScriptError(f"utterance {uid}: timestamps decrease")
            starts = {e.speech_start_ms for e in evs}
            if len(starts) != 1:
                raise ReplayScriptError(f"utterance {uid}: speech_start_ms varies")

    def save(self, events_path, refs_path=None) -> None:
        with open(events_path, "w", encoding="utf-8") as f:
            for ev in self.events:
                f.write(json.dumps(ev.to_dict(), ensure_ascii=False) + "\n")
        if refs_path is not None:
            with open(refs_path, "w", encoding="utf-8") as f:
                for (uid, lang), ref in self.references.items():
                    f.write(
                        json.dumps(
                            {
                                "utterance_id": uid,
                                "target_lang": lang,
                                "reference": ref,
                            },
                            ensure_ascii=False,
                        )
                        + "\n"
                    )


def load_script(events_path, refs_path=None) -> ReplayScript:
    """Load and validate a replay script; errors carry the line number."""
    events: List[TranscriptEvent] = []
    with open(events_path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(TranscriptEvent.from_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError) as e:
                raise ReplayScriptError(f"{events_path}:{lineno}: {e}") from e
    references: Dict[Tuple[str, str], str] = {}
    if refs_path is not None:
        with open(refs_path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    d = json.loads(line)
                    references[(d["utterance_id"], d["target_lang"])] = d["reference"]
                except (ValueError, KeyError, TypeError) as e:
                    raise ReplayScriptError(f"{refs_path}:{lineno}: {e}") from e
    script = ReplayScript(events=sorted(events, key=lambda e: e.timestamp_ms), references=references)
    script.validate()
    return script


class VirtualClock:
    """Clock driven by the event stream, not wall time."""

    def __init__(self, start_ms: int = 0):
        self._now_ms = start_ms

    def now_ms(self) -> int:
        return self._now_ms

    def advance_to(self, ts_ms: int) -> None:
        if ts_ms > self._now_ms:
            self._now_ms = ts_ms


class RealtimeClock:
    """Wall clock anchored at construction; advance_to sleeps."""

    def __init__(self):
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    def advance_to(self, ts_ms: int) -> None:
        delta = ts_ms / 1000.0 - (time.monotonic() - self._t0)
        if delta > 0:
            time.sleep(delta)


class Replayer:
    """Single-consumer iterator over a validated script."""

    def __init__(self, script: ReplayScript, clock=None):
        script.validate()
        self.script = script
        self.clock = clock if clock is not None else VirtualClock()

    def __iter__(self) -> Iterator[TranscriptEvent]:
        for ev in self.script.events:
            self.clock.advance_to(ev.timestamp_ms)
            yield ev


_WORD_POOLS = {
    "en": (
        "the cat sat on a mat and then it ran to see some birds over "
        "green hills while we watched quiet clouds drift past old trees"
    ).split(),
    "es": (
        "el gato come pan y luego corre por la casa grande mientras "
        "vemos nubes lentas sobre los arboles viejos del parque verde"
    ).split(),
    "pt": (
        "o gato come pao e depois corre pela casa grande enquanto "
        "vemos nuvens lentas sobre as arvores velhas do parque verde"
    ).split(),
    "zh": list("我们今天开会讨论系统翻译字幕质量很好大家说话速度快"),
}


def synthesize(
    n_utterances: int,
    lang: str,
    revision_rate: float,
    seed: int,
    session_id: str = "synthetic",
    speaker_id: str = "speaker-0",
) -> ReplayScript:
    """Generate a valid replay script with a controllable revision mix.

    Revision rate 0 yields an append-only stream. References are the
    identity mapping: the final transcript, keyed by the source language.
    """
    if n_utterances < 1:
        raise ValueError("n_utterances must be >= 1")
    check_language(lang)
    rng = random.Random(seed)
    pool = _WORD_POOLS[lang]
    events: List[TranscriptEvent] = []
    references: Dict[Tuple[str, str], str] = {}
    clock_ms = 0
    for u in range(n_utterances):
        uid = f"u{u:04d}"
        n_tokens = rng.randint(4, 12)
        tokens = [rng.choice(pool) for _ in range(n_tokens)]
        speech_start = clock_ms
        seq = 0
        shown: List[str] = []
        for i, tok in enumerate(tokens):
            shown.append(tok)
            if shown[:-1] and rng.random() < revision_rate:
                # Revise one earlier word, modeling an ASR rewrite.
                j = rng.randrange(len(shown) - 1)
                shown[j] = rng.choice(pool)
                tokens[j] = shown[j]
            clock_ms += rng.randint(150, 450)
            is_final = i == len(tokens) - 1
            events.append(
                TranscriptEvent(
                    session_id=session_id,
                    speaker_id=speaker_id,
                    utterance_id=uid,
                    seq=seq,
                    timestamp_ms=clock_ms,
                    speech_start_ms=speech_start,
                    text=join_tokens(lang, shown),
                    is_final=is_final,
                )
            )
            seq += 1
        references[(uid, lang)] = join_tokens(lang, tokens)
        clock_ms += rng.randint(300, 800)
    script = ReplayScript(events=events, references=references)
    script.validate()
    return script
