import json

import pytest
from fastapi.testclient import TestClient

from meetcap.protocol import decode_message, encode_message, make_message
from meetcap.server import build_app


@pytest.fixture
def client():
    app = build_app(config={}, backend_name="identity")
    with TestClient(app) as client:
        yield client


def send(ws, type_, payload):
    ws.send_text(encode_message(make_message(type_, payload)))


def recv(ws):
    return decode_message(ws.receive_text())


def recv_until(ws, type_, limit=50):
    for _ in range(limit):
        msg = recv(ws)
        if msg["type"] == type_:
            return msg
    raise AssertionError(f"no {type_} message within {limit} messages")


def transcript_event(text, seq, final=False, uid="u0", ts=None):
    return {
        "session_id": "sess",
        "speaker_id": "s0",
        "utterance_id": uid,
        "seq": seq,
        "timestamp_ms": ts if ts is not None else (seq + 1) * 250,
        "speech_start_ms": 0,
        "text": text,
        "is_final": final,
    }


def test_create_room_http(client):
    resp = client.post("/rooms", json={"mask_k": 2})
    assert resp.status_code == 200
    body = resp.json()
    assert body["room_id"]
    assert body["policy"]["mask_k"] == 2


def test_create_room_bad_settings(client):
    assert client.post("/rooms", json={"translate_t_ms": -5}).status_code == 400


def test_transcript_endpoint_unknown_room(client):
    assert client.get("/rooms/nope/transcript").status_code == 404


def test_join_and_caption_flow(client):
    room_id = client.post("/rooms", json={"mask_k": 0}).json()["room_id"]
    with client.websocket_connect("/ws") as ws:
        send(ws, "join", {
            "room_id": room_id, "name": "A",
            "spoken_lang": "en", "caption_lang": "en",
        })
        state = recv_until(ws, "room_state")
        assert state["payload"]["participants"][0]["display_name"] == "A"
        send(ws, "transcript_event", transcript_event("hello", 0))
        caption = recv_until(ws, "caption_update")
        assert caption["payload"]["tokens"] == ["hello"]
        send(ws, "transcript_event", transcript_event("hello world", 1, final=True))
        final = recv_until(ws, "caption_update")
        assert final["payload"]["is_final"] is True

    resp = client.get(f"/rooms/{room_id}/transcript", params={"lang": "en"})
    assert "hello world" in resp.text


def test_two_clients_cross_delivery(client):
    room_id = client.post("/rooms", json={"mask_k": 0}).json()["room_id"]
    with client.websocket_connect("/ws") as ws_a, client.websocket_connect("/ws") as ws_b:
        send(ws_a, "join", {"room_id": room_id, "name": "A",
                            "spoken_lang": "en", "caption_lang": "en"})
        recv_until(ws_a, "room_state")
        send(ws_b, "join", {"room_id": room_id, "name": "B",
                            "spoken_lang": "en", "caption_lang": "en"})
        recv_until(ws_b, "resync")
        send(ws_a, "transcript_event", transcript_event("hi there", 0, final=True))
        caption = recv_until(ws_b, "caption_update")
        assert caption["payload"]["tokens"] == ["hi", "there"]


def test_error_for_unknown_room_join(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, "join", {"room_id": "zzz", "name": "A",
                          "spoken_lang": "en", "caption_lang": "en"})
        err = recv_until(ws, "error")
        assert "zzz" in err["payload"]["message"]


def test_must_join_first(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, "transcript_event", transcript_event("hello", 0))
        assert recv(ws)["type"] == "error"


def test_audio_chunk_without_adapter_errors(client):
    room_id = client.post("/rooms", json={}).json()["room_id"]
    with client.websocket_connect("/ws") as ws:
        send(ws, "join", {"room_id": room_id, "name": "A",
                          "spoken_lang": "en", "caption_lang": "en"})
        recv_until(ws, "room_state")
        send(ws, "audio_chunk", {"data": "AAA=", "seq": 0})
        assert recv_until(ws, "error")


def test_malformed_message_reports_error(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text("{broken")
        assert recv(ws)["type"] == "error"


def test_resync_restores_history_on_reconnect(client):
    room_id = client.post("/rooms", json={"mask_k": 0}).json()["room_id"]
    with client.websocket_connect("/ws") as ws:
        send(ws, "join", {"room_id": room_id, "name": "A",
                          "spoken_lang": "en", "caption_lang": "en"})
        recv_until(ws, "room_state")
        send(ws, "transcript_event",
             transcript_event("state to restore", 0, final=True))
        recv_until(ws, "caption_update")
    with client.websocket_connect("/ws") as ws2:
        send(ws2, "join", {"room_id": room_id, "name": "A2",
                           "spoken_lang": "en", "caption_lang": "en"})
        resync = recv_until(ws2, "resync")
        history = resync["payload"]["history"]
        assert [h["text"] for h in history] == ["state to restore"]


def test_game_over_websocket():
    wordlist_cards = [
        {"word_id": "w1", "forms": {"en": {"primary": "piano",
                                           "accepted": [], "forbidden": []}}},
    ]
    import tempfile, os
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "words.jsonl")
        with open(path, "w") as f:
            for c in wordlist_cards:
                f.write(json.dumps(c) + "\n")
        app = build_app(config={"wordlist": path}, backend_name="identity")
        with TestClient(app) as client:
            room_id = client.post("/rooms", json={"mask_k": 0}).json()["room_id"]
            with client.websocket_connect("/ws") as ws_a, \
                 client.websocket_connect("/ws") as ws_b:
                send(ws_a, "join", {"room_id": room_id, "name": "A",
                                    "spoken_lang": "en", "caption_lang": "en"})
                recv_until(ws_a, "room_state")
                send(ws_b, "join", {"room_id": room_id, "name": "B",
                                    "spoken_lang": "en", "caption_lang": "en"})
                recv_until(ws_b, "resync")
                send(ws_a, "game_action", {"action": "start", "seed": 0})
                assigned = recv_until(ws_a, "game_event")
                while assigned["payload"]["type"] != "word_assigned":
                    assigned = recv_until(ws_a, "game_event")
                send(ws_b, "transcript_event",
                     transcript_event("is it a piano", 0, final=True))
                msg = recv_until(ws_b, "game_event")
                while msg["payload"]["type"] != "correct_guess":
                    msg = recv_until(ws_b, "game_event")
                assert msg["payload"]["word_id"] == "w1"
