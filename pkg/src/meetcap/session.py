"""Rooms, participants, and caption routing.

This is the transport-free core of the live server: the WebSocket layer
(meetcap.server) is a thin shell around RoomManager. Subscribers are
bounded queues; a slow consumer loses oldest messages and is handed a
resync snapshot instead of blocking the pipeline.

Caption pipelines are keyed by (speaker, target language) and shared by
all listeners of that language, so one MT call serves everyone. Events
from one speaker are processed in arrival order; an out-of-order seq is
dropped with a diagnostic rather than corrupting pipeline state.
"""

from __future__ import annotations

import json
import logging
import os
import secrets
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from . import game as game_mod
from .backends import MTBackend, MTRequest, TranslateError
from .caption import Captioner
from .protocol import make_message
from .text import join_tokens, tokenize
from .types import CaptionUpdate, PolicyConfig, TranscriptEvent, check_language

logger = logging.getLogger(__name__)

DEFAULT_QUEUE_LIMIT = 256


class SessionError(Exception):
    pass


class Subscriber:
    """Bounded outbound message queue for one connection."""

    def __init__(self, participant_id: str, limit: int = DEFAULT_QUEUE_LIMIT):
        self.participant_id = participant_id
        self.limit = limit
        self.queue: deque = deque()
        self.dropped = 0

    def push(self, msg: dict) -> None:
        if len(self.queue) >= self.limit:
            self.queue.popleft()
            self.dropped += 1
        self.queue.append(msg)

    def drain(self) -> List[dict]:
        out = list(self.queue)
        self.queue.clear()
        return out


@dataclass
class Participant:
    participant_id: str
    display_name: str
    spoken_lang: str
    caption_lang: str
    subscriber: Subscriber

    def __post_init__(self):
        if not self.display_name:
            raise SessionError("display name must be non-empty")
        check_language(self.spoken_lang)
        check_language(self.caption_lang)


@dataclass
class TranscriptEntry:
    """One finalized utterance in the room history."""

    speaker_id: str
    speaker_name: str
    utterance_id: str
    source_lang: str
    source_text: str
    timestamp_ms: int
    translations: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "speaker_id": self.speaker_id,
            "speaker_name": self.speaker_name,
            "utterance_id": self.utterance_id,
            "source_lang": self.source_lang,
            "source_text": self.source_text,
            "timestamp_ms": self.timestamp_ms,
            "translations": dict(self.translations),
        }


class Room:
    def __init__(
        self,
        room_id: str,
        policy: PolicyConfig,
        backend: MTBackend,
        profanity_lexicon: Optional[Set[str]] = None,
        persist_path: Optional[str] = None,
    ):
        self.room_id = room_id
        self.policy = policy
        self.backend = backend
        self.profanity_lexicon = profanity_lexicon or set()
        self.persist_path = persist_path
        self.participants: Dict[str, Participant] = {}
        self.captioners: Dict[str, Captioner] = {}  # keyed by speaker_id
        self.history: List[TranscriptEntry] = []
        self._entries_by_utterance: Dict[str, TranscriptEntry] = {}
        self.game: Optional[game_mod.GameState] = None
        self.game_wordlist: List[game_mod.WordCard] = []
        self.last_event_ms = 0
        self._lock = threading.Lock()

    # -- membership ---------------------------------------------------

    def caption_langs(self) -> Set[str]:
        return {p.caption_lang for p in self.participants.values()}

    def join(self, name: str, spoken_lang: str, caption_lang: str) -> Participant:
        participant = Participant(
            participant_id=secrets.token_hex(8),
            display_name=name,
            spoken_lang=spoken_lang,
            caption_lang=caption_lang,
            subscriber=Subscriber(participant_id=""),
        )
        participant.subscriber.participant_id = participant.participant_id
        with self._lock:
            self.participants[participant.participant_id] = participant
            for captioner in self.captioners.values():
                captioner.register_target(caption_lang)
            self._broadcast(self._room_state_message())
            participant.subscriber.push(self._snapshot_message(caption_lang))
        return participant

    def leave(self, participant_id: str) -> None:
        with self._lock:
            self.participants.pop(participant_id, None)
            self._broadcast(self._room_state_message())

    def set_caption_language(self, participant_id: str, lang: str) -> None:
        check_language(lang)
        with self._lock:
            p = self._participant(participant_id)
            if p.caption_lang == lang:
                return
            p.caption_lang = lang
            for captioner in self.captioners.values():
                captioner.register_target(lang)
            p.subscriber.push(self._snapshot_message(lang))

    def _participant(self, participant_id: str) -> Participant:
        if participant_id not in self.participants:
            raise SessionError(f"unknown participant {participant_id}")
        return self.participants[participant_id]

    # -- captioning ---------------------------------------------------

    def ingest_transcript(self, participant_id: str, event: TranscriptEvent) -> List[CaptionUpdate]:
        with self._lock:
            speaker = self._participant(participant_id)
            self.last_event_ms = max(self.last_event_ms, event.timestamp_ms)
            captioner = self.captioners.get(participant_id)
            if captioner is None:
                captioner = Captioner(
                    source_lang=speaker.spoken_lang,
                    policy=self.policy,
                    backend=self.backend,
                    target_langs=sorted(self.caption_langs() | {speaker.spoken_lang}),
                    profanity_lexicon=self.profanity_lexicon,
                )
                self.captioners[participant_id] = captioner
            else:
                for lang in self.caption_langs():
                    captioner.register_target(lang)

            updates = captioner.process_event(event)
            for update in updates:
                msg = make_message("caption_update", update.to_dict())
                for p in self.participants.values():
                    if p.caption_lang == update.target_lang:
                        p.subscriber.push(msg)

            if event.is_final:
                self._record_final(speaker, event, updates)
            self._feed_game(speaker, event, updates)
            return updates

    def _record_final(
        self, speaker: Participant, event: TranscriptEvent, updates: List[CaptionUpdate]
    ) -> None:
        entry = TranscriptEntry(
            speaker_id=speaker.participant_id,
            speaker_name=speaker.display_name,
            utterance_id=event.utterance_id,
            source_lang=speaker.spoken_lang,
            source_text=event.text,
            timestamp_ms=event.timestamp_ms,
        )
        for update in updates:
            if update.is_final:
                entry.translations[update.target_lang] = join_tokens(
                    update.target_lang, update.tokens
                )
        self.history.append(entry)
        self._entries_by_utterance[event.utterance_id] = entry
        msg = make_message("transcript_entry", entry.to_dict())
        for p in self.participants.values():
            p.subscriber.push(msg)
        if self.persist_path:
            with open(self.persist_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry.to_dict(), ensure_ascii=False) + "\n")

    def _translate_text(self, source_lang: str, target_lang: str, text: str) -> str:
        if source_lang == target_lang or not text:
            return text
        try:
            result = self.backend.translate(
                MTRequest(
                    source_lang=source_lang, target_lang=target_lang, source_text=text
                )
            )
        except TranslateError as e:
            logger.error("history translation failed: %s", e)
            return ""
        return join_tokens(target_lang, result.tokens)

    def history_in(self, lang: str) -> List[dict]:
        """Room history rendered in one language, translating on demand."""
        check_language(lang)
        out = []
        for entry in self.history:
            if lang not in entry.translations:
                entry.translations[lang] = self._translate_text(
                    entry.source_lang, lang, entry.source_text
                )
            d = entry.to_dict()
            d["text"] = entry.translations[lang]
            out.append(d)
        return out

    def transcript_document(self, lang: str) -> str:
        """Saved transcript: one line per finalized utterance."""
        lines = []
        for entry in self.history_in(lang):
            ts = entry["timestamp_ms"] / 1000.0
            lines.append(f"[{ts:9.3f}s] {entry['speaker_name']}: {entry['text']}")
        return "\n".join(lines)

    # -- game ---------------------------------------------------------

    def handle_game_action(self, participant_id: str, action: dict) -> List[dict]:
        with self._lock:
            self._participant(participant_id)
            kind = action.get("action")
            now = self.last_event_ms
            if kind == "start":
                wordlist = self.game_wordlist
                if not wordlist:
                    raise SessionError("no wordlist loaded for this room")
                self.game = game_mod.start_round(
                    participants=sorted(self.participants),
                    describer=action.get("describer", participant_id),
                    wordlist=wordlist,
                    mode=action.get("mode", "cooperative"),
                    seed=int(action.get("seed", 0)),
                    now_ms=int(action.get("now_ms", now)),
                )
                return self._flush_game_events()
            if self.game is None:
                raise SessionError("no active game")
            if kind == "skip":
                if participant_id != self.game.describer:
                    raise SessionError("only the describer may skip")
                game_mod.skip(self.game, int(action.get("now_ms", now)))
            elif kind == "tick":
                game_mod.tick(self.game, int(action.get("now_ms", now)))
            else:
                raise SessionError(f"unknown game action {kind!r}")
            return self._flush_game_events()

    def _feed_game(
        self, speaker: Participant, event: TranscriptEvent, updates: List[CaptionUpdate]
    ) -> None:
        if self.game is None or self.game.over:
            return
        now = event.timestamp_ms
        lang = speaker.spoken_lang
        if event.is_final:
            tokens = tokenize(lang, event.text)
        else:
            # Spot on the stable prefix of the speaker's own-language caption.
            own = [u for u in updates if u.target_lang == lang]
            if not own:
                return
            tokens = list(own[-1].tokens[: own[-1].stable_prefix_len])
        if not tokens:
            return
        if speaker.participant_id == self.game.describer:
            game_mod.on_describer_transcript(self.game, lang, tokens, now)
        else:
            game_mod.on_guesser_caption(
                self.game, speaker.participant_id, lang, tokens, now
            )
        self._flush_game_events()

    def _flush_game_events(self) -> List[dict]:
        if self.game is None:
            return []
        events = self.game.events
        self.game.events = []
        out = []
        for ev in events:
            msg = make_message("game_event", ev)
            out.append(msg)
            for p in self.participants.values():
                if ev["type"] == "word_assigned" and p.participant_id != self.game.describer:
                    continue  # the secret word goes to the describer only
                p.subscriber.push(msg)
        return out

    # -- messages -----------------------------------------------------

    def _room_state_message(self) -> dict:
        return make_message(
            "room_state",
            {
                "room_id": self.room_id,
                "policy": self.policy.to_dict(),
                "participants": [
                    {
                        "participant_id": p.participant_id,
                        "display_name": p.display_name,
                        "spoken_lang": p.spoken_lang,
                        "caption_lang": p.caption_lang,
                    }
                    for p in sorted(
                        self.participants.values(), key=lambda p: p.participant_id
                    )
                ],
            },
        )

    def _snapshot_message(self, lang: str) -> dict:
        return make_message(
            "resync",
            {
                "room_id": self.room_id,
                "history": self.history_in(lang),
                "caption_lang": lang,
            },
        )

    def _broadcast(self, msg: dict) -> None:
        for p in self.participants.values():
            p.subscriber.push(msg)


class RoomManager:
    """All live rooms; the HTTP/WebSocket layer delegates here."""

    def __init__(
        self,
        backend: MTBackend,
        default_policy: Optional[PolicyConfig] = None,
        profanity_lexicon: Optional[Set[str]] = None,
        persist_dir: Optional[str] = None,
        wordlist: Optional[List[game_mod.WordCard]] = None,
    ):
        self.backend = backend
        self.default_policy = default_policy or PolicyConfig()
        self.profanity_lexicon = profanity_lexicon or set()
        self.persist_dir = persist_dir
        self.wordlist = wordlist or []
        self.rooms: Dict[str, Room] = {}
        self._participants: Dict[str, Room] = {}
        self._lock = threading.Lock()

    def create_room(
        self, settings: Optional[dict] = None, room_id: Optional[str] = None
    ) -> Room:
        settings = dict(settings or {})
        policy_keys = set(self.default_policy.to_dict())
        overrides = {k: v for k, v in settings.items() if k in policy_keys}
        unknown = set(settings) - policy_keys - {"backend"}
        if unknown:
            raise SessionError(f"unknown room settings: {sorted(unknown)}")
        policy = PolicyConfig.from_dict({**self.default_policy.to_dict(), **overrides})
        rid = room_id or secrets.token_urlsafe(6)
        with self._lock:
            if rid in self.rooms:
                raise SessionError(f"room {rid!r} already exists")
            persist_path = None
            if self.persist_dir:
                os.makedirs(self.persist_dir, exist_ok=True)
                persist_path = os.path.join(self.persist_dir, f"{rid}.jsonl")
            room = Room(
                room_id=rid,
                policy=policy,
                backend=self.backend,
                profanity_lexicon=self.profanity_lexicon,
                persist_path=persist_path,
            )
            room.game_wordlist = list(self.wordlist)
            self.rooms[rid] = room
        return room

    def get_room(self, room_id: str) -> Room:
        if room_id not in self.rooms:
            raise SessionError(f"unknown room {room_id!r}")
        return self.rooms[room_id]

    def join(
        self, room_id: str, name: str, spoken_lang: str, caption_lang: str
    ) -> Participant:
        room = self.get_room(room_id)
        participant = room.join(name, spoken_lang, caption_lang)
        with self._lock:
            self._participants[participant.participant_id] = room
        return participant

    def room_of(self, participant_id: str) -> Room:
        if participant_id not in self._participants:
            raise SessionError(f"unknown participant {participant_id}")
        return self._participants[participant_id]

    def ingest_transcript(self, participant_id: str, event: TranscriptEvent):
        return self.room_of(participant_id).ingest_transcript(participant_id, event)

    def set_caption_language(self, participant_id: str, lang: str) -> None:
        self.room_of(participant_id).set_caption_language(participant_id, lang)

    def save_transcript(self, room_id: str, lang: str) -> str:
        return self.get_room(room_id).transcript_document(lang)
