"""HTTP + WebSocket shell around RoomManager.

Endpoints:
  POST /rooms                     create a room, body = settings JSON
  GET  /rooms/{id}/transcript     saved transcript, ?lang= selects language
  WS   /ws                        the full-duplex caption protocol

Every WebSocket message is {"type": ..., "payload": ...}; see
meetcap.protocol for the type inventory. All connections share one event
loop, so cross-connection fan-out happens inline after each inbound
message by draining the bounded per-connection queues.
"""

from __future__ import annotations

import json
import logging
from typing import Dict, Optional

from fastapi import FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse

from .backends import EndpointConfig, make_backend
from .game import load_wordlist
from .protocol import ProtocolError, decode_message, encode_message, make_message
from .session import RoomManager, SessionError
from .types import TranscriptEvent

logger = logging.getLogger(__name__)


def build_manager(config: Optional[dict] = None, backend_name: str = "identity") -> RoomManager:
    config = config or {}
    lexicon = config.get("lexicon")
    if isinstance(lexicon, str):
        with open(lexicon, "r", encoding="utf-8") as f:
            lexicon = json.load(f)
    endpoint = None
    if config.get("endpoint"):
        endpoint = EndpointConfig(**config["endpoint"])
    backend = make_backend(backend_name, lexicon=lexicon, endpoint=endpoint)
    wordlist = []
    if config.get("wordlist"):
        wordlist = load_wordlist(config["wordlist"])
    profanity = set(config.get("profanity", []))
    from .types import PolicyConfig

    policy = PolicyConfig.from_dict(config.get("policy", {})) if config.get("policy") else None
    return RoomManager(
        backend=backend,
        default_policy=policy,
        profanity_lexicon=profanity,
        persist_dir=config.get("persist_dir"),
        wordlist=wordlist,
    )


def build_app(config: Optional[dict] = None, backend_name: str = "identity") -> FastAPI:
    manager = build_manager(config, backend_name)
    app = FastAPI(title="meetcap")
    app.state.manager = manager
    connections: Dict[str, WebSocket] = {}
    app.state.connections = connections

    @app.post("/rooms")
    async def create_room(settings: Optional[dict] = None):
        try:
            room = manager.create_room(settings or {})
        except (SessionError, ValueError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return {"room_id": room.room_id, "policy": room.policy.to_dict()}

    @app.get("/rooms/{room_id}/transcript", response_class=PlainTextResponse)
    async def transcript(room_id: str, lang: str = Query("en")):
        try:
            return manager.save_transcript(room_id, lang)
        except SessionError as e:
            raise HTTPException(status_code=404, detail=str(e))
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))

    async def flush_room(room) -> None:
        for p in list(room.participants.values()):
            ws = connections.get(p.participant_id)
            if ws is None:
                continue
            for msg in p.subscriber.drain():
                try:
                    await ws.send_text(encode_message(msg))
                except Exception:  # connection died mid-send
                    connections.pop(p.participant_id, None)
                    break

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        participant = None
        room = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = decode_message(raw)
                except ProtocolError as e:
                    await ws.send_text(
                        encode_message(make_message("error", {"message": str(e)}))
                    )
                    continue
                mtype, payload = msg["type"], msg["payload"]
                try:
                    if mtype == "join":
                        participant = manager.join(
                            payload["room_id"],
                            payload["name"],
                            payload["spoken_lang"],
                            payload["caption_lang"],
                        )
                        room = manager.room_of(participant.participant_id)
                        connections[participant.participant_id] = ws
                        await ws.send_text(
                            encode_message(
                                make_message(
                                    "room_state",
                                    room._room_state_message()["payload"]
                                    | {"participant_id": participant.participant_id},
                                )
                            )
                        )
                        await flush_room(room)
                    elif participant is None:
                        raise SessionError("join first")
                    elif mtype == "transcript_event":
                        event = TranscriptEvent.from_dict(payload)
                        room.ingest_transcript(participant.participant_id, event)
                        await flush_room(room)
                    elif mtype == "set_caption_language":
                        room.set_caption_language(
                            participant.participant_id, payload["lang"]
                        )
                        await flush_room(room)
                    elif mtype == "game_action":
                        room.handle_game_action(participant.participant_id, payload)
                        await flush_room(room)
                    elif mtype == "audio_chunk":
                        raise SessionError(
                            "no external ASR adapter configured; send transcript_event"
                        )
                    elif mtype == "leave":
                        break
                    else:
                        raise SessionError(f"unexpected client message {mtype!r}")
                except (SessionError, ValueError, KeyError) as e:
                    await ws.send_text(
                        encode_message(make_message("error", {"message": str(e)}))
                    )
        except WebSocketDisconnect:
            pass
        finally:
            if participant is not None:
                connections.pop(participant.participant_id, None)
                if room is not None:
                    room.leave(participant.participant_id)
                    await flush_room(room)

    return app
