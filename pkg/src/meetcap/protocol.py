"""Wire protocol: JSON messages {"type": ..., "payload": ...}.

Serialization is canonical (sorted keys, compact separators, raw UTF-8)
so that serialize -> parse -> serialize is byte-identical; clients in
any language can rely on that for golden-file tests.
"""

from __future__ import annotations

import json
from typing import Any, Dict

CLIENT_TYPES = (
    "join",
    "leave",
    "set_caption_language",
    "transcript_event",
    "audio_chunk",
    "game_action",
)
SERVER_TYPES = (
    "room_state",
    "caption_update",
    "transcript_entry",
    "game_event",
    "error",
    "resync",
)
MESSAGE_TYPES = CLIENT_TYPES + SERVER_TYPES


class ProtocolError(ValueError):
    pass


def make_message(type_: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    if type_ not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {type_!r}")
    return {"type": type_, "payload": payload}


def encode_message(msg: Dict[str, Any]) -> str:
    if msg.get("type") not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {msg.get('type')!r}")
    if "payload" not in msg:
        raise ProtocolError("message has no payload")
    return json.dumps(msg, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def decode_message(raw: str) -> Dict[str, Any]:
    try:
        msg = json.loads(raw)
    except ValueError as e:
        raise ProtocolError(f"not valid JSON: {e}") from e
    if not isinstance(msg, dict):
        raise ProtocolError("message must be a JSON object")
    if msg.get("type") not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {msg.get('type')!r}")
    if not isinstance(msg.get("payload"), dict):
        raise ProtocolError("payload must be a JSON object")
    return msg
