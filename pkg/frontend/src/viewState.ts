// Client-side view model. Renders only server-sent state; nothing here
// re-derives captioning decisions, so two clients fed the same messages
// always show the same thing.

import {
  CaptionUpdate,
  CaptionUpdateSchema,
  GameEvent,
  GameEventSchema,
  Message,
  Participant,
  Policy,
  Resync,
  ResyncSchema,
  RoomState,
  RoomStateSchema,
  TranscriptEntry,
  TranscriptEntrySchema,
} from "./protocol";
import { GamePanelModel } from "./gamePanel";

export interface ViewState {
  connection: "idle" | "connecting" | "open" | "closed";
  roomId: string | null;
  participantId: string | null;
  policy: Policy | null;
  participants: Participant[];
  captionLang: string | null;
  /** Latest caption revision per speaker. */
  captions: Map<string, CaptionUpdate>;
  transcript: TranscriptEntry[];
  game: GamePanelModel;
  lastError: string | null;
}

export function initialViewState(): ViewState {
  return {
    connection: "idle",
    roomId: null,
    participantId: null,
    policy: null,
    participants: [],
    captionLang: null,
    captions: new Map(),
    transcript: [],
    game: new GamePanelModel(),
    lastError: null,
  };
}

/** Fold one server message into the view state, mutating in place. */
export function applyMessage(state: ViewState, msg: Message): void {
  switch (msg.type) {
    case "room_state": {
      const room: RoomState = RoomStateSchema.parse(msg.payload);
      state.roomId = room.room_id;
      state.policy = room.policy;
      state.participants = room.participants;
      if (room.participant_id) {
        state.participantId = room.participant_id;
        state.game.selfId = room.participant_id;
      }
      break;
    }
    case "caption_update": {
      const update: CaptionUpdate = CaptionUpdateSchema.parse(msg.payload);
      const last = state.captions.get(update.speaker_id);
      if (
        last &&
        last.utterance_id === update.utterance_id &&
        last.update_seq >= update.update_seq
      ) {
        return; // stale revision
      }
      state.captions.set(update.speaker_id, update);
      break;
    }
    case "transcript_entry": {
      state.transcript.push(TranscriptEntrySchema.parse(msg.payload));
      break;
    }
    case "resync": {
      const snapshot: Resync = ResyncSchema.parse(msg.payload);
      state.roomId = snapshot.room_id;
      state.captionLang = snapshot.caption_lang;
      state.transcript = snapshot.history.slice();
      state.captions.clear();
      break;
    }
    case "game_event": {
      const event: GameEvent = GameEventSchema.parse(msg.payload);
      state.game.applyEvent(event);
      break;
    }
    case "error": {
      state.lastError = String(msg.payload["message"] ?? "unknown error");
      break;
    }
    default:
      // Client message types never arrive from the server; ignore if they do.
      break;
  }
}

/** Text of one transcript entry in the viewer's caption language. */
export function entryText(entry: TranscriptEntry, lang: string | null): string {
  if (lang && entry.translations[lang] !== undefined) {
    return entry.translations[lang];
  }
  return entry.text ?? entry.source_text;
}

/** The transcript panel as plain lines, for rendering and for tests. */
export function transcriptLines(state: ViewState): string[] {
  return state.transcript.map(
    (entry) => `${entry.speaker_name}: ${entryText(entry, state.captionLang)}`,
  );
}
