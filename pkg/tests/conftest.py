import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from meetcap.types import TranscriptEvent


def make_events(texts, utterance_id="u0", speaker_id="s0", start_ms=0, step_ms=300):
    """Build a well-formed event stream from successive hypothesis texts."""
    events = []
    t = start_ms
    for i, text in enumerate(texts):
        t += step_ms
        events.append(
            TranscriptEvent(
                session_id="sess",
                speaker_id=speaker_id,
                utterance_id=utterance_id,
                seq=i,
                timestamp_ms=t,
                speech_start_ms=start_ms,
                text=text,
                is_final=i == len(texts) - 1,
            )
        )
    return events
