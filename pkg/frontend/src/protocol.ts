// Wire protocol mirror of the server: {"type": ..., "payload": ...} over
// one WebSocket, serialized canonically (sorted keys, no whitespace, raw
// UTF-8) so serialize -> parse -> serialize is byte-identical on both ends.

import { z } from "zod";

export const CLIENT_TYPES = [
  "join",
  "leave",
  "set_caption_language",
  "transcript_event",
  "audio_chunk",
  "game_action",
] as const;

export const SERVER_TYPES = [
  "room_state",
  "caption_update",
  "transcript_entry",
  "game_event",
  "error",
  "resync",
] as const;

export const MESSAGE_TYPES = [...CLIENT_TYPES, ...SERVER_TYPES] as const;
export type MessageType = (typeof MESSAGE_TYPES)[number];

export const SUPPORTED_LANGUAGES = ["en", "zh", "es", "pt"] as const;
export type Language = (typeof SUPPORTED_LANGUAGES)[number];

export class ProtocolError extends Error {}

export const TranscriptEventSchema = z.object({
  session_id: z.string(),
  speaker_id: z.string(),
  utterance_id: z.string(),
  seq: z.number().int().nonnegative(),
  timestamp_ms: z.number().int(),
  speech_start_ms: z.number().int(),
  text: z.string(),
  is_final: z.boolean(),
});
export type TranscriptEvent = z.infer<typeof TranscriptEventSchema>;

export const CaptionUpdateSchema = z.object({
  utterance_id: z.string(),
  speaker_id: z.string(),
  target_lang: z.string(),
  update_seq: z.number().int().nonnegative(),
  timestamp_ms: z.number().int(),
  tokens: z.array(z.string()),
  stable_prefix_len: z.number().int().nonnegative(),
  lines: z.array(z.string()),
  line_ids: z.array(z.string()),
  is_final: z.boolean(),
});
export type CaptionUpdate = z.infer<typeof CaptionUpdateSchema>;

export const PolicySchema = z.object({
  translate_k: z.number().int().min(1),
  translate_t_ms: z.number().int().min(0),
  mask_k: z.number().int().min(0),
  mask_ramp: z.boolean(),
  bias_enabled: z.boolean(),
  window_lines: z.number().int().min(1),
  window_cols: z.number().int().min(1),
  profanity_enabled: z.boolean(),
});
export type Policy = z.infer<typeof PolicySchema>;

export const ParticipantSchema = z.object({
  participant_id: z.string(),
  display_name: z.string(),
  spoken_lang: z.string(),
  caption_lang: z.string(),
});
export type Participant = z.infer<typeof ParticipantSchema>;

export const RoomStateSchema = z.object({
  room_id: z.string(),
  policy: PolicySchema,
  participants: z.array(ParticipantSchema),
  // Present only on the direct reply to our own join.
  participant_id: z.string().optional(),
});
export type RoomState = z.infer<typeof RoomStateSchema>;

export const TranscriptEntrySchema = z.object({
  speaker_id: z.string(),
  speaker_name: z.string(),
  utterance_id: z.string(),
  source_lang: z.string(),
  source_text: z.string(),
  timestamp_ms: z.number().int(),
  translations: z.record(z.string(), z.string()),
  // resync history entries carry the text pre-rendered in our language
  text: z.string().optional(),
});
export type TranscriptEntry = z.infer<typeof TranscriptEntrySchema>;

export const ResyncSchema = z.object({
  room_id: z.string(),
  history: z.array(TranscriptEntrySchema),
  caption_lang: z.string(),
});
export type Resync = z.infer<typeof ResyncSchema>;

export const GameEventSchema = z.looseObject({ type: z.string() });
export type GameEvent = z.infer<typeof GameEventSchema>;

export interface Message {
  type: MessageType;
  payload: Record<string, unknown>;
}

const MessageShape = z.object({
  type: z.enum(MESSAGE_TYPES),
  payload: z.record(z.string(), z.unknown()),
});

/**
 * JSON.stringify with recursively sorted object keys and compact
 * separators; matches the server's canonical form byte for byte.
 */
export function canonicalStringify(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalStringify).join(",") + "]";
  }
  const obj = value as Record<string, unknown>;
  const parts = Object.keys(obj)
    .sort()
    .map((k) => JSON.stringify(k) + ":" + canonicalStringify(obj[k]));
  return "{" + parts.join(",") + "}";
}

export function makeMessage(
  type: MessageType,
  payload: Record<string, unknown>,
): Message {
  if (!MESSAGE_TYPES.includes(type)) {
    throw new ProtocolError(`unknown message type ${JSON.stringify(type)}`);
  }
  return { type, payload };
}

export function encodeMessage(msg: Message): string {
  const checked = MessageShape.safeParse(msg);
  if (!checked.success) {
    throw new ProtocolError(`bad message: ${checked.error.message}`);
  }
  return canonicalStringify(msg);
}

export function decodeMessage(raw: string): Message {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (e) {
    throw new ProtocolError(`not valid JSON: ${e}`);
  }
  const checked = MessageShape.safeParse(parsed);
  if (!checked.success) {
    throw new ProtocolError(`bad message: ${checked.error.message}`);
  }
  return checked.data as Message;
}

/** Per-language joiner: Chinese renders with no separator between tokens. */
export function joinTokens(lang: string, tokens: readonly string[]): string {
  return tokens.join(lang === "zh" ? "" : " ");
}

/** Display width in terminal-style cells; Chinese characters take two. */
export function textWidth(lang: string, text: string): number {
  return lang === "zh" ? text.length * 2 : text.length;
}
