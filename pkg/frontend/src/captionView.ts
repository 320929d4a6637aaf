// Live caption overlay for one speaker's stream.
//
// The server does all the captioning; this class only paints what it is
// told. Three rendering rules matter for flicker perception:
//   - a line whose id is unchanged keeps its DOM element, so revising the
//     tail of the last line never repaints the whole block;
//   - when a new line pushes the oldest off, the block moves in one
//     vertical animation step instead of jumping;
//   - tokens past stable_prefix_len are drawn at reduced opacity (they
//     may still be revised by the next update).

import { CaptionUpdate, joinTokens, textWidth } from "./protocol";

export interface CaptionViewOptions {
  windowLines: number;
  windowCols: number;
  scrollDurationMs?: number;
  fadeOpacity?: number;
}

export class CaptionView {
  readonly container: HTMLElement;
  readonly options: Required<CaptionViewOptions>;
  /** How many smooth scroll steps have been animated (for tests/telemetry). */
  scrollSteps = 0;

  private lineEls = new Map<string, HTMLElement>();
  private lastSeq = new Map<string, number>();

  constructor(container: HTMLElement, options: CaptionViewOptions) {
    this.container = container;
    this.options = {
      scrollDurationMs: 150,
      fadeOpacity: 0.55,
      ...options,
    };
    container.classList.add("caption-view");
  }

  /** Current on-screen text, one string per visible line. */
  visibleLines(): string[] {
    const out: string[] = [];
    this.container
      .querySelectorAll<HTMLElement>(".caption-line")
      .forEach((el) => out.push(el.textContent ?? ""));
    return out;
  }

  text(): string {
    return this.visibleLines().join("\n");
  }

  render(update: CaptionUpdate): void {
    const streamKey = `${update.speaker_id}|${update.utterance_id}|${update.target_lang}`;
    const last = this.lastSeq.get(streamKey);
    if (last !== undefined && update.update_seq <= last) {
      return; // stale or duplicate revision, ignore
    }
    this.lastSeq.set(streamKey, update.update_seq);

    // Never draw outside the advertised geometry, whatever arrives.
    const lines = update.lines.slice(-this.options.windowLines);
    const lineIds = update.line_ids.slice(-this.options.windowLines);

    const incoming = new Set(lineIds);
    let removedOldest = false;
    for (const [id, el] of this.lineEls) {
      if (!incoming.has(id)) {
        if (el === this.container.firstElementChild) {
          removedOldest = true;
        }
        el.remove();
        this.lineEls.delete(id);
      }
    }

    const stableChars = this.stableCharCount(update);
    const fullText = joinTokens(update.target_lang, update.tokens);
    let cursor = 0;
    let previous: HTMLElement | null = null;
    for (let i = 0; i < lines.length; i++) {
      const id = lineIds[i];
      const content = this.clampLine(update.target_lang, lines[i]);
      let el = this.lineEls.get(id);
      if (!el) {
        el = this.container.ownerDocument.createElement("div");
        el.className = "caption-line";
        el.dataset.lineId = id;
        if (previous) {
          previous.after(el);
        } else {
          this.container.prepend(el);
        }
        this.lineEls.set(id, el);
      }
      // Locate this line's slice of the full display to split stable/pending.
      const at = fullText.indexOf(content, cursor);
      const start = at >= 0 ? at : cursor;
      cursor = start + content.length;
      this.paintLine(el, content, Math.max(0, Math.min(content.length, stableChars - start)));
      previous = el;
    }

    if (removedOldest && lines.length > 0) {
      this.animateScrollStep();
    }
  }

  /** Drop everything, e.g. after a resync that replaces the room view. */
  clear(): void {
    for (const el of this.lineEls.values()) {
      el.remove();
    }
    this.lineEls.clear();
    this.lastSeq.clear();
  }

  private stableCharCount(update: CaptionUpdate): number {
    if (update.is_final) {
      // A final caption never changes again, whatever the bias said.
      return joinTokens(update.target_lang, update.tokens).length;
    }
    const stable = update.tokens.slice(0, update.stable_prefix_len);
    return joinTokens(update.target_lang, stable).length;
  }

  private clampLine(lang: string, line: string): string {
    if (textWidth(lang, line) <= this.options.windowCols) {
      return line;
    }
    const perChar = lang === "zh" ? 2 : 1;
    return line.slice(0, Math.max(1, Math.floor(this.options.windowCols / perChar)));
  }

  private paintLine(el: HTMLElement, content: string, stableChars: number): void {
    el.textContent = "";
    const doc = this.container.ownerDocument;
    const stableSpan = doc.createElement("span");
    stableSpan.className = "caption-stable";
    stableSpan.textContent = content.slice(0, stableChars);
    el.appendChild(stableSpan);
    if (stableChars < content.length) {
      const pendingSpan = doc.createElement("span");
      pendingSpan.className = "caption-pending";
      pendingSpan.style.opacity = String(this.options.fadeOpacity);
      pendingSpan.textContent = content.slice(stableChars);
      el.appendChild(pendingSpan);
    }
  }

  private animateScrollStep(): void {
    this.scrollSteps += 1;
    const style = this.container.style;
    style.transition = "none";
    style.transform = "translateY(1.4em)";
    // Force the start position, then ease back to rest.
    void this.container.getBoundingClientRect();
    style.transition = `transform ${this.options.scrollDurationMs}ms ease-out`;
    style.transform = "translateY(0)";
  }
}
