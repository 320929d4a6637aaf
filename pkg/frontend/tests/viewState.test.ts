import { describe, expect, it } from "vitest";

import { makeMessage } from "../src/protocol";
import {
  applyMessage,
  initialViewState,
  transcriptLines,
} from "../src/viewState";

const POLICY = {
  translate_k: 1,
  translate_t_ms: 0,
  mask_k: 4,
  mask_ramp: true,
  bias_enabled: true,
  window_lines: 3,
  window_cols: 60,
  profanity_enabled: true,
};

function roomState(extra: Record<string, unknown> = {}) {
  return makeMessage("room_state", {
    room_id: "r1",
    policy: POLICY,
    participants: [
      { participant_id: "p1", display_name: "ana", spoken_lang: "es", caption_lang: "en" },
    ],
    ...extra,
  });
}

function entry(name: string, text: string, translations: Record<string, string> = {}) {
  return {
    speaker_id: "p1",
    speaker_name: name,
    utterance_id: `u-${text}`,
    source_lang: "en",
    source_text: text,
    timestamp_ms: 0,
    translations,
  };
}

describe("applyMessage", () => {
  it("captures our participant id from the join reply only", () => {
    const state = initialViewState();
    applyMessage(state, roomState({ participant_id: "p1" }));
    expect(state.participantId).toBe("p1");
    applyMessage(state, roomState()); // broadcast update, no id
    expect(state.participantId).toBe("p1");
    expect(state.policy?.mask_k).toBe(4);
  });

  it("keeps only the newest caption per speaker", () => {
    const state = initialViewState();
    const base = {
      utterance_id: "u1",
      speaker_id: "s1",
      target_lang: "en",
      timestamp_ms: 0,
      tokens: ["a"],
      stable_prefix_len: 1,
      lines: ["a"],
      line_ids: ["x"],
      is_final: false,
    };
    applyMessage(state, makeMessage("caption_update", { ...base, update_seq: 2 }));
    applyMessage(state, makeMessage("caption_update", { ...base, update_seq: 1 }));
    expect(state.captions.get("s1")?.update_seq).toBe(2);
  });

  it("resync replaces the transcript and caption language", () => {
    const state = initialViewState();
    applyMessage(state, makeMessage("transcript_entry", entry("ana", "old line")));
    applyMessage(
      state,
      makeMessage("resync", {
        room_id: "r1",
        caption_lang: "en",
        history: [
          { ...entry("ana", "hola", { en: "hello" }), text: "hello" },
          { ...entry("bo", "second"), text: "second" },
        ],
      }),
    );
    expect(transcriptLines(state)).toEqual(["ana: hello", "bo: second"]);
    expect(state.captionLang).toBe("en");
    expect(state.captions.size).toBe(0);
  });

  it("prefers the translation in the viewer's language", () => {
    const state = initialViewState();
    state.captionLang = "es";
    applyMessage(
      state,
      makeMessage("transcript_entry", entry("ana", "the bridge", { es: "el puente" })),
    );
    expect(transcriptLines(state)).toEqual(["ana: el puente"]);
  });

  it("records server errors", () => {
    const state = initialViewState();
    applyMessage(state, makeMessage("error", { message: "join first" }));
    expect(state.lastError).toBe("join first");
  });
});
