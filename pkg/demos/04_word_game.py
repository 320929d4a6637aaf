"""Play a scripted bilingual word-guessing round against the engine.

A Chinese-speaking describer hints at words; an English-speaking guesser
answers through the caption stream. The engine spots correct guesses,
enforces the forbidden-word rule, and keeps score.
"""

from meetcap.game import (
    WordCard,
    on_describer_transcript,
    on_guesser_caption,
    skip,
    start_round,
)

CARDS = [
    WordCard("w1", {"en": {"primary": "eyelash", "accepted": [], "forbidden": ["eyelashes"]},
                    "zh": {"primary": "睫毛", "accepted": [], "forbidden": []}}),
    WordCard("w2", {"en": {"primary": "raccoon", "accepted": [], "forbidden": []},
                    "zh": {"primary": "浣熊", "accepted": [], "forbidden": []}}),
    WordCard("w3", {"en": {"primary": "bridge", "accepted": [], "forbidden": []},
                    "zh": {"primary": "桥", "accepted": [], "forbidden": []}}),
]

state = start_round(["zhang", "smith"], "zhang", CARDS, seed=5, now_ms=0)
print(f"describer sees: {state.current.primary('zh')} / {state.current.primary('en')}")

print("\ndescriber hints (zh): 它长在你的眼皮上")
on_describer_transcript(state, "zh", list("它长在你的眼皮上"), 8_000)

guess = ["is", "it", "an", state.current.primary("en")]
print(f"guesser says (en captions): {' '.join(guess)}")
on_guesser_caption(state, "smith", "en", guess, 15_000)

print(f"\nteam score: {state.team_score}")
print("describer skips the next card")
skip(state, 20_000)

print("\nevent log:")
for event in state.events:
    print(f"  {event}")
