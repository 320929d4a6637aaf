"""Synthesize a replay session, evaluate it, and print the metrics table.

Shows the full offline loop: generate a script with a revision-heavy
ASR stream, replay it through a policy, and score the caption stream a
viewer would have seen.
"""

import tempfile
from pathlib import Path

from meetcap import PolicyConfig, RunSpec, run_evaluate, synthesize

with tempfile.TemporaryDirectory() as d:
    events = Path(d) / "events.jsonl"
    refs = Path(d) / "refs.jsonl"
    synthesize(n_utterances=20, lang="en", revision_rate=0.35, seed=7).save(
        events, refs
    )

    for mask_k in (0, 4):
        spec = RunSpec(
            replay_path=str(events),
            refs_path=str(refs),
            policy=PolicyConfig(mask_k=mask_k),
            backend="identity",
            out_dir=str(Path(d) / f"out_mask{mask_k}"),
        )
        report = run_evaluate(spec).report
        print(f"\n=== mask_k={mask_k} ===")
        print(report.to_table())
