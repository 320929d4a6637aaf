"""Cross-lingual word-guessing game (a Taboo variant).

One player (the describer) is shown a secret word in their language and
describes it; the others guess by reading translated captions. The
engine spots correct guesses automatically from caption token streams,
enforces the forbidden-word rule and the 3-skip budget, and runs a
4-minute round clock. Cooperative mode scores the team; competitive mode
rewards fast guesses and the clue-giver.

All mutations are pure-ish methods on GameState, serialized by the room
that owns the game; timer expiry is delivered as tick() in the same
event order.
"""

from __future__ import annotations

import json
import random
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .types import check_language

ROUND_DURATION_MS = 240_000
MAX_SKIPS = 3

_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)


def normalize_token(lang: str, token: str) -> str:
    """Case-fold and strip punctuation; diacritics are preserved."""
    stripped = _PUNCT_RE.sub("", token)
    return stripped.casefold()


def _phrase_tuples(lang: str, surface: str) -> Tuple[str, ...]:
    if lang == "zh":
        return tuple(ch for ch in surface if not ch.isspace())
    return tuple(
        normalize_token(lang, t) for t in surface.split() if normalize_token(lang, t)
    )


@dataclass(frozen=True)
class WordCard:
    """One secret word with per-language accepted and forbidden forms."""

    word_id: str
    forms: Dict[str, dict]  # lang -> {"primary", "accepted": [...], "forbidden": [...]}

    def primary(self, lang: str) -> str:
        return self.forms[lang]["primary"]

    def accepted(self, lang: str) -> Set[Tuple[str, ...]]:
        entry = self.forms[lang]
        out = {_phrase_tuples(lang, s) for s in entry.get("accepted", [])}
        out.add(_phrase_tuples(lang, entry["primary"]))
        return out

    def forbidden(self, lang: str) -> Set[Tuple[str, ...]]:
        entry = self.forms[lang]
        out = {_phrase_tuples(lang, s) for s in entry.get("forbidden", [])}
        out.add(_phrase_tuples(lang, entry["primary"]))
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "WordCard":
        return cls(word_id=d["word_id"], forms=d["forms"])

    def to_dict(self) -> dict:
        return {"word_id": self.word_id, "forms": self.forms}


def load_wordlist(path) -> List[WordCard]:
    cards: List[WordCard] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                cards.append(WordCard.from_dict(json.loads(line)))
            except (ValueError, KeyError) as e:
                raise ValueError(f"{path}:{lineno}: bad word card: {e}") from e
    return cards


def _contains_phrase(tokens: Sequence[str], phrases: Set[Tuple[str, ...]]) -> bool:
    norm = list(tokens)
    max_len = max((len(p) for p in phrases), default=0)
    for i in range(len(norm)):
        for l in range(1, min(max_len, len(norm) - i) + 1):
            if tuple(norm[i : i + l]) in phrases:
                return True
    return False


class GameError(Exception):
    pass


@dataclass
class GameState:
    mode: str  # "cooperative" | "competitive"
    describer: str
    guessers: Set[str]
    queue: List[WordCard]
    current: Optional[WordCard]
    round_ends_at_ms: int
    card_shown_at_ms: int
    skips_used: int = 0
    team_score: int = 0
    scores: Dict[str, int] = field(default_factory=dict)
    seed: int = 0
    over: bool = False
    events: List[dict] = field(default_factory=list)

    def _emit(self, type_: str, **payload) -> dict:
        ev = {"type": type_, **payload}
        self.events.append(ev)
        return ev


def start_round(
    participants: Sequence[str],
    describer: str,
    wordlist: Sequence[WordCard],
    mode: str = "cooperative",
    seed: int = 0,
    now_ms: int = 0,
) -> GameState:
    """Shuffle the deck with a recorded seed and arm the round timer."""
    if len(participants) < 2:
        raise GameError("need at least 2 participants")
    if not wordlist:
        raise GameError("wordlist is empty")
    if describer not in participants:
        raise GameError("describer must be a participant")
    if mode not in ("cooperative", "competitive"):
        raise GameError(f"unknown mode {mode!r}")
    deck = list(wordlist)
    random.Random(seed).shuffle(deck)
    state = GameState(
        mode=mode,
        describer=describer,
        guessers={p for p in participants if p != describer},
        queue=deck[1:],
        current=deck[0],
        round_ends_at_ms=now_ms + ROUND_DURATION_MS,
        card_shown_at_ms=now_ms,
        seed=seed,
        scores={p: 0 for p in participants},
    )
    state._emit("start", mode=mode, describer=describer, seed=seed, n_cards=len(deck))
    state._emit("word_assigned", word_id=deck[0].word_id)
    return state


def _advance(state: GameState, now_ms: int) -> None:
    if state.queue:
        state.current = state.queue.pop(0)
        state.card_shown_at_ms = now_ms
        state._emit("word_assigned", word_id=state.current.word_id)
    else:
        state.current = None
        _end_round(state, now_ms, reason="deck exhausted")


def _end_round(state: GameState, now_ms: int, reason: str) -> None:
    if state.over:
        return
    state.over = True
    state._emit("round_end", reason=reason, at_ms=now_ms)
    state._emit(
        "scoreboard",
        team_score=state.team_score,
        scores=dict(sorted(state.scores.items())),
    )


def tick(state: GameState, now_ms: int) -> None:
    """Deliver clock progress; ends the round when time is up."""
    if not state.over and now_ms >= state.round_ends_at_ms:
        _end_round(state, now_ms, reason="time")


def competitive_points(elapsed_ms: int) -> int:
    """Faster cards are worth more: 11 at 0 ms down to 1 at 4 minutes."""
    elapsed_ms = max(0, min(ROUND_DURATION_MS, elapsed_ms))
    return 1 + (10 * (ROUND_DURATION_MS - elapsed_ms)) // ROUND_DURATION_MS


def on_describer_transcript(
    state: GameState, lang: str, tokens: Sequence[str], now_ms: int
) -> Optional[dict]:
    """Check a describer's (final or stable) transcript for forbidden words.

    A violation auto-skips the card, consuming a skip; once skips are
    exhausted the card is forfeited with no point.
    """
    check_language(lang)
    tick(state, now_ms)
    if state.over or state.current is None:
        return None
    norm = [normalize_token(lang, t) for t in tokens]
    norm = [t for t in norm if t]
    if lang == "zh":
        norm = [ch for t in norm for ch in t]
    if not _contains_phrase(norm, state.current.forbidden(lang)):
        return None
    word_id = state.current.word_id
    if state.skips_used < MAX_SKIPS:
        state.skips_used += 1
        ev = state._emit(
            "violation", word_id=word_id, penalty="skip", skips_used=state.skips_used
        )
    else:
        ev = state._emit("violation", word_id=word_id, penalty="forfeit")
    _advance(state, now_ms)
    return ev


def on_guesser_caption(
    state: GameState, guesser_id: str, lang: str, tokens: Sequence[str], now_ms: int
) -> Optional[dict]:
    """Spot a correct guess in a guesser's caption stream."""
    check_language(lang)
    tick(state, now_ms)
    if state.over or state.current is None:
        return None
    if guesser_id not in state.guessers:
        return None
    norm = [normalize_token(lang, t) for t in tokens]
    norm = [t for t in norm if t]
    if lang == "zh":
        norm = [ch for t in norm for ch in t]
    if not _contains_phrase(norm, state.current.accepted(lang)):
        return None
    word_id = state.current.word_id
    elapsed = now_ms - state.card_shown_at_ms
    if state.mode == "cooperative":
        state.team_score += 1
        points = 1
    else:
        points = competitive_points(elapsed)
        state.scores[guesser_id] = state.scores.get(guesser_id, 0) + points
        state.scores[state.describer] = state.scores.get(state.describer, 0) + points
    ev = state._emit(
        "correct_guess",
        word_id=word_id,
        guesser=guesser_id,
        elapsed_ms=elapsed,
        points=points,
    )
    _advance(state, now_ms)
    return ev


def skip(state: GameState, now_ms: int) -> dict:
    """Describer skips the current card; at most three per round."""
    tick(state, now_ms)
    if state.over or state.current is None:
        raise GameError("round is over")
    if state.skips_used >= MAX_SKIPS:
        raise GameError("skip budget exhausted")
    state.skips_used += 1
    ev = state._emit(
        "skip", word_id=state.current.word_id, skips_used=state.skips_used
    )
    _advance(state, now_ms)
    return ev
