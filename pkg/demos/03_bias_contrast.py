"""Reproduce the biased-decoding contrast with the dictionary backend.

The unbiased dictionary backend re-picks synonyms from a hash of the
whole source string, so each hypothesis extension can flip earlier words
and flicker. Passing the previous output back as a bias pins those
choices. Compare the erasure and burstiness columns.
"""

import tempfile
from pathlib import Path

from meetcap import PolicyConfig, RunSpec, run_evaluate, synthesize

LEXICON = {
    "en-en": {
        "cat": ["cat", "kitty"],
        "ran": ["ran", "sprinted"],
        "see": ["see", "view"],
        "mat": ["mat", "rug"],
        "birds": ["birds", "fowl"],
        "hills": ["hills", "mounds"],
    }
}

with tempfile.TemporaryDirectory() as d:
    events = Path(d) / "events.jsonl"
    refs = Path(d) / "refs.jsonl"
    synthesize(n_utterances=15, lang="en", revision_rate=0.0, seed=8).save(
        events, refs
    )
    for bias in (False, True):
        spec = RunSpec(
            replay_path=str(events),
            refs_path=str(refs),
            policy=PolicyConfig(mask_k=0, bias_enabled=bias),
            backend="dictionary",
            lexicon=LEXICON,
        )
        report = run_evaluate(spec).report
        print(f"\n=== bias_enabled={bias} ===")
        print(report.to_table())
