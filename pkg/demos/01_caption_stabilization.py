"""Walk through the caption stabilization knobs on a single utterance.

Feeds one growing ASR hypothesis through the pipeline under a few
policies and prints what a viewer would see after each update, so you
can watch mask-k suppress the unstable tail and translate-t thin out
the updates.
"""

from meetcap import CaptionPipeline, IdentityBackend, PolicyConfig, TranscriptEvent

HYPOTHESES = [
    "the quick",
    "the quick brown",
    "the quick brown fox jumps",
    "the quick brown fox jumps over the lazy",
    "the quick brown fox jumps over the lazy dog",
]


def stream(policy, label):
    print(f"\n=== {label} ===")
    pipeline = CaptionPipeline("en", "en", policy, IdentityBackend())
    t = 0
    for i, text in enumerate(HYPOTHESES):
        t += 400
        event = TranscriptEvent(
            session_id="demo",
            speaker_id="s0",
            utterance_id="u0",
            seq=i,
            timestamp_ms=t,
            speech_start_ms=0,
            text=text,
            is_final=i == len(HYPOTHESES) - 1,
        )
        update = pipeline.process_event(event)
        if update is None:
            print(f"  t={t:5d}ms  (no update)")
        else:
            marker = " FINAL" if update.is_final else ""
            print(f"  t={t:5d}ms  {' '.join(update.tokens)!r}{marker}")


stream(PolicyConfig(mask_k=0), "no masking: every revision shows immediately")
stream(PolicyConfig(mask_k=4, mask_ramp=True), "mask-4 with ramp: tail held back")
stream(
    PolicyConfig(mask_k=0, translate_t_ms=900),
    "translate-t 900ms: fewer, larger updates",
)
