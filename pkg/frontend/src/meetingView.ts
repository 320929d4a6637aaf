// Meeting view: static avatar tiles with caption overlays, a transcript
// panel, and the game panel, all driven by server messages.

import { CaptionView } from "./captionView";
import { renderGamePanel } from "./gamePanel";
import { CaptionUpdateSchema, Message } from "./protocol";
import { RoomClient } from "./client";
import {
  applyMessage,
  initialViewState,
  transcriptLines,
  ViewState,
} from "./viewState";

export interface MeetingViewOptions {
  scrollDurationMs?: number;
  fadeOpacity?: number;
}

export class MeetingView {
  readonly state: ViewState = initialViewState();
  readonly root: HTMLElement;

  private captionViews = new Map<string, CaptionView>();
  private tiles: HTMLElement;
  private transcriptPanel: HTMLElement;
  private gamePanelEl: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly client: RoomClient,
    private readonly options: MeetingViewOptions = {},
  ) {
    this.root = root;
    const doc = root.ownerDocument;
    this.tiles = doc.createElement("div");
    this.tiles.className = "tiles";
    this.transcriptPanel = doc.createElement("div");
    this.transcriptPanel.className = "transcript-panel";
    this.gamePanelEl = doc.createElement("div");
    root.append(this.tiles, this.transcriptPanel, this.gamePanelEl);
    client.onMessage = (msg) => this.handleMessage(msg);
    client.onStatusChange = (status) => {
      this.state.connection = status;
    };
  }

  handleMessage(msg: Message): void {
    if (msg.type === "resync") {
      // The snapshot replaces everything we had; in-flight caption text
      // is abandoned and rebuilt from subsequent updates.
      for (const view of this.captionViews.values()) {
        view.clear();
      }
    }
    applyMessage(this.state, msg);
    if (msg.type === "caption_update") {
      const update = CaptionUpdateSchema.parse(msg.payload);
      this.captionViewFor(update.speaker_id).render(update);
    }
    this.renderTranscript();
    this.renderGame();
  }

  captionViewFor(speakerId: string): CaptionView {
    let view = this.captionViews.get(speakerId);
    if (!view) {
      const doc = this.root.ownerDocument;
      const tile = doc.createElement("div");
      tile.className = "tile";
      tile.dataset.speakerId = speakerId;
      const avatar = doc.createElement("div");
      avatar.className = "avatar";
      avatar.textContent = this.displayName(speakerId);
      const overlay = doc.createElement("div");
      overlay.className = "caption-overlay";
      tile.append(avatar, overlay);
      this.tiles.appendChild(tile);
      view = new CaptionView(overlay, {
        windowLines: this.state.policy?.window_lines ?? 3,
        windowCols: this.state.policy?.window_cols ?? 60,
        scrollDurationMs: this.options.scrollDurationMs,
        fadeOpacity: this.options.fadeOpacity,
      });
      this.captionViews.set(speakerId, view);
    }
    return view;
  }

  /** The transcript panel text, used directly by the resync equality test. */
  transcriptText(): string {
    return transcriptLines(this.state).join("\n");
  }

  private displayName(speakerId: string): string {
    const p = this.state.participants.find(
      (x) => x.participant_id === speakerId,
    );
    return p ? p.display_name : speakerId;
  }

  private renderTranscript(): void {
    const doc = this.root.ownerDocument;
    this.transcriptPanel.textContent = "";
    for (const line of transcriptLines(this.state)) {
      const el = doc.createElement("div");
      el.className = "transcript-line";
      el.textContent = line;
      this.transcriptPanel.appendChild(el);
    }
  }

  private renderGame(): void {
    renderGamePanel(this.state.game, this.gamePanelEl, {
      onSkip: () => this.client.gameAction({ action: "skip" }),
      onGuess: () => {
        /* guesses travel as transcript events; see TextFallbackInput */
      },
    });
  }
}
