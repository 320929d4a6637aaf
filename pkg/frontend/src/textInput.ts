// Text fallback for rooms without microphone capture.
//
// Typing a sentence and submitting it produces the same TranscriptEvent
// stream a streaming recognizer would: growing partial hypotheses, one
// word at a time (one character at a time for Chinese), then a final.
// The rest of the system cannot tell the difference.

import { TranscriptEvent } from "./protocol";

export interface WordByWordOptions {
  sessionId: string;
  speakerId: string;
  utteranceId: string;
  lang: string;
  text: string;
  startMs: number;
  stepMs?: number;
}

function pieces(lang: string, text: string): string[] {
  if (lang === "zh") {
    return [...text].filter((ch) => !/\s/.test(ch));
  }
  return text.split(/\s+/).filter((w) => w.length > 0);
}

/** Build the synthetic partial-then-final event stream for one utterance. */
export function wordByWordEvents(opts: WordByWordOptions): TranscriptEvent[] {
  const stepMs = opts.stepMs ?? 250;
  const parts = pieces(opts.lang, opts.text);
  if (parts.length === 0) {
    return [];
  }
  const joiner = opts.lang === "zh" ? "" : " ";
  const events: TranscriptEvent[] = [];
  for (let i = 0; i < parts.length; i++) {
    events.push({
      session_id: opts.sessionId,
      speaker_id: opts.speakerId,
      utterance_id: opts.utteranceId,
      seq: i,
      timestamp_ms: opts.startMs + i * stepMs,
      speech_start_ms: opts.startMs,
      text: parts.slice(0, i + 1).join(joiner),
      is_final: i === parts.length - 1,
    });
  }
  return events;
}

export interface TextFallbackOptions {
  sessionId: string;
  speakerId: string;
  lang: string;
  sendEvent: (event: TranscriptEvent) => void;
  /** Pause between synthetic partials; 0 sends them back to back. */
  stepMs?: number;
  now?: () => number;
}

/** Stateful submitter that numbers utterances and paces the partials. */
export class TextFallbackInput {
  private counter = 0;

  constructor(private readonly opts: TextFallbackOptions) {}

  async submit(text: string): Promise<TranscriptEvent[]> {
    const now = this.opts.now ?? Date.now;
    const stepMs = this.opts.stepMs ?? 250;
    const events = wordByWordEvents({
      sessionId: this.opts.sessionId,
      speakerId: this.opts.speakerId,
      utteranceId: `${this.opts.speakerId}-u${this.counter++}`,
      lang: this.opts.lang,
      text,
      startMs: now(),
      stepMs,
    });
    for (const [i, event] of events.entries()) {
      if (i > 0 && stepMs > 0) {
        await new Promise((resolve) => setTimeout(resolve, stepMs));
      }
      this.opts.sendEvent(event);
    }
    return events;
  }
}
