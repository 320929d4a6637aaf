// Word-game panel: role-aware model plus a small DOM renderer.
//
// The server is authoritative; the panel only folds game_event messages.
// Role gating happens twice: the server never sends word_assigned to
// guessers, and the renderer additionally hides the word block unless
// this participant is the describer.

import { GameEvent } from "./protocol";

export const MAX_SKIPS = 3;

export class GamePanelModel {
  selfId: string | null = null;
  active = false;
  over = false;
  mode: string | null = null;
  describer: string | null = null;
  /** Only ever set for the describer; the server withholds it otherwise. */
  currentWordId: string | null = null;
  skipsUsed = 0;
  teamScore = 0;
  scores: Record<string, number> = {};
  roundEndedReason: string | null = null;
  guessedWordIds: string[] = [];

  isDescriber(): boolean {
    return this.selfId !== null && this.selfId === this.describer;
  }

  skipsRemaining(): number {
    return Math.max(0, MAX_SKIPS - this.skipsUsed);
  }

  skipDisabled(): boolean {
    return !this.active || this.over || this.skipsUsed >= MAX_SKIPS;
  }

  guessDisabled(): boolean {
    return !this.active || this.over;
  }

  applyEvent(event: GameEvent): void {
    switch (event.type) {
      case "start":
        this.active = true;
        this.over = false;
        this.mode = String(event["mode"]);
        this.describer = String(event["describer"]);
        this.skipsUsed = 0;
        this.teamScore = 0;
        this.scores = {};
        this.currentWordId = null;
        this.roundEndedReason = null;
        this.guessedWordIds = [];
        break;
      case "word_assigned":
        this.currentWordId = String(event["word_id"]);
        break;
      case "skip":
      case "violation":
        if (typeof event["skips_used"] === "number") {
          this.skipsUsed = event["skips_used"];
        }
        this.currentWordId = null;
        break;
      case "correct_guess": {
        this.guessedWordIds.push(String(event["word_id"]));
        const points = Number(event["points"] ?? 0);
        const guesser = String(event["guesser"]);
        if (this.mode === "cooperative") {
          this.teamScore += 1;
        } else if (this.describer) {
          this.scores[guesser] = (this.scores[guesser] ?? 0) + points;
          this.scores[this.describer] =
            (this.scores[this.describer] ?? 0) + points;
        }
        this.currentWordId = null;
        break;
      }
      case "round_end":
        this.over = true;
        this.roundEndedReason = String(event["reason"] ?? "");
        break;
      case "scoreboard":
        this.teamScore = Number(event["team_score"] ?? this.teamScore);
        this.scores = { ...(event["scores"] as Record<string, number>) };
        break;
      default:
        console.warn("unknown game event type:", event.type);
    }
  }
}

export interface GamePanelHandlers {
  onSkip: () => void;
  onGuess: (text: string) => void;
}

/**
 * (Re)paint the panel into `container`. Idempotent: call it after every
 * game_event; score changes appear without any reload.
 */
export function renderGamePanel(
  model: GamePanelModel,
  container: HTMLElement,
  handlers: GamePanelHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  container.classList.add("game-panel");
  if (!model.active) {
    const idle = doc.createElement("div");
    idle.className = "game-idle";
    idle.textContent = "no round in progress";
    container.appendChild(idle);
    return;
  }

  if (model.isDescriber()) {
    const word = doc.createElement("div");
    word.className = "game-word";
    word.textContent = model.currentWordId ?? "";
    container.appendChild(word);

    const skipBtn = doc.createElement("button");
    skipBtn.className = "game-skip";
    skipBtn.textContent = `skip (${model.skipsRemaining()} left)`;
    skipBtn.disabled = model.skipDisabled();
    skipBtn.addEventListener("click", () => {
      if (!skipBtn.disabled) {
        handlers.onSkip();
      }
    });
    container.appendChild(skipBtn);
  } else {
    const input = doc.createElement("input");
    input.className = "game-guess";
    input.type = "text";
    input.disabled = model.guessDisabled();
    const submit = doc.createElement("button");
    submit.className = "game-guess-submit";
    submit.textContent = "guess";
    submit.disabled = model.guessDisabled();
    submit.addEventListener("click", () => {
      if (!submit.disabled && input.value.trim()) {
        handlers.onGuess(input.value.trim());
        input.value = "";
      }
    });
    container.appendChild(input);
    container.appendChild(submit);
  }

  const score = doc.createElement("div");
  score.className = "game-score";
  if (model.mode === "cooperative") {
    score.textContent = `team score: ${model.teamScore}`;
  } else {
    score.textContent = Object.entries(model.scores)
      .sort(([a], [b]) => a.localeCompare(b))
      .map(([who, pts]) => `${who}: ${pts}`)
      .join("  ");
  }
  container.appendChild(score);

  if (model.over) {
    const done = doc.createElement("div");
    done.className = "game-over";
    done.textContent = `round over (${model.roundEndedReason})`;
    container.appendChild(done);
  }
}
