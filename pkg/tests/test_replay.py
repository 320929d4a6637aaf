import json

import pytest

from conftest import make_events
from meetcap.replay import (
    Replayer,
    ReplayScript,
    ReplayScriptError,
    VirtualClock,
    load_script,
    synthesize,
)


def test_virtual_replay_advances_clock(tmp_path):
    events = make_events(["a", "a b", "a b c"], step_ms=300)
    script = ReplayScript(events=events)
    clock = VirtualClock()
    seen = list(Replayer(script, clock))
    assert len(seen) == 3
    assert clock.now_ms() == events[-1].timestamp_ms


def test_empty_script_immediate_end():
    assert list(Replayer(ReplayScript(events=[]))) == []


def test_missing_final_rejected():
    events = make_events(["a", "a b"])
    no_final = [e for e in events if not e.is_final]
    with pytest.raises(ReplayScriptError, match="final"):
        ReplayScript(events=no_final).validate()


def test_load_error_names_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    good = make_events(["a", "a b"])[0].to_dict()
    path.write_text(json.dumps(good) + "\n{not json\n")
    with pytest.raises(ReplayScriptError, match=r"bad\.jsonl:2"):
        load_script(path)


def test_save_load_roundtrip(tmp_path):
    script = synthesize(5, "en", 0.3, seed=7)
    ev_path = tmp_path / "events.jsonl"
    refs_path = tmp_path / "refs.jsonl"
    script.save(ev_path, refs_path)
    loaded = load_script(ev_path, refs_path)
    assert loaded.events == script.events
    assert loaded.references == script.references


def test_replay_determinism_virtual_mode():
    script = synthesize(5, "en", 0.5, seed=3)
    a = [(e.timestamp_ms, e.text) for e in Replayer(script)]
    b = [(e.timestamp_ms, e.text) for e in Replayer(script)]
    assert a == b


class TestSynthesize:
    def test_revision_rate_zero_is_append_only(self):
        script = synthesize(10, "en", 0.0, seed=1)
        by_utt = {}
        for e in script.events:
            prev = by_utt.get(e.utterance_id, "")
            assert e.text.startswith(prev)
            by_utt[e.utterance_id] = e.text

    def test_fixed_seed_identical(self):
        a = synthesize(8, "en", 0.4, seed=42)
        b = synthesize(8, "en", 0.4, seed=42)
        assert a.events == b.events and a.references == b.references

    def test_n_finals(self):
        script = synthesize(100, "en", 0.2, seed=0)
        assert sum(1 for e in script.events if e.is_final) == 100

    def test_zh_script_valid(self):
        script = synthesize(5, "zh", 0.3, seed=2)
        script.validate()
        assert all((uid, "zh") in script.references for uid in {
            e.utterance_id for e in script.events
        })

    def test_references_match_finals_identity(self):
        script = synthesize(5, "en", 0.5, seed=9)
        finals = {e.utterance_id: e.text for e in script.events if e.is_final}
        for (uid, lang), ref in script.references.items():
            assert ref == finals[uid]
