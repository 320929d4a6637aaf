// Room pages: home -> create (settings form) -> landing (name and
// languages) -> meeting. The create form mirrors the server's policy
// knobs and validates with the same bounds, so a form that passes here
// is accepted by POST /rooms.

import { SUPPORTED_LANGUAGES } from "./protocol";

export interface RoomSettings {
  translate_k: number;
  translate_t_ms: number;
  mask_k: number;
  mask_ramp: boolean;
  bias_enabled: boolean;
  window_lines: number;
  window_cols: number;
  profanity_enabled: boolean;
}

/** Same defaults the server applies when a field is omitted. */
export function defaultRoomSettings(): RoomSettings {
  return {
    translate_k: 1,
    translate_t_ms: 0,
    mask_k: 4,
    mask_ramp: true,
    bias_enabled: true,
    window_lines: 3,
    window_cols: 60,
    profanity_enabled: true,
  };
}

export type FieldErrors = Partial<Record<keyof RoomSettings, string>>;

export function validateRoomSettings(settings: RoomSettings): FieldErrors {
  const errors: FieldErrors = {};
  const intIn = (v: number) => Number.isInteger(v);
  if (!intIn(settings.translate_k) || settings.translate_k < 1) {
    errors.translate_k = "must be an integer >= 1";
  }
  if (!intIn(settings.translate_t_ms) || settings.translate_t_ms < 0) {
    errors.translate_t_ms = "must be an integer >= 0";
  }
  if (!intIn(settings.mask_k) || settings.mask_k < 0) {
    errors.mask_k = "must be an integer >= 0";
  }
  if (!intIn(settings.window_lines) || settings.window_lines < 1) {
    errors.window_lines = "must be an integer >= 1";
  }
  if (!intIn(settings.window_cols) || settings.window_cols < 1) {
    errors.window_cols = "must be an integer >= 1";
  }
  return errors;
}

export interface LandingDetails {
  name: string;
  spokenLang: string;
  captionLang: string;
}

export function validateLanding(details: LandingDetails): string[] {
  const problems: string[] = [];
  if (!details.name.trim()) {
    problems.push("display name must be non-empty");
  }
  const langs: readonly string[] = SUPPORTED_LANGUAGES;
  if (!langs.includes(details.spokenLang)) {
    problems.push(`spoken language must be one of ${langs.join(", ")}`);
  }
  if (!langs.includes(details.captionLang)) {
    problems.push(`caption language must be one of ${langs.join(", ")}`);
  }
  return problems;
}

export type Page =
  | { name: "home" }
  | { name: "create"; settings: RoomSettings; errors: FieldErrors }
  | { name: "landing"; roomId: string }
  | { name: "meeting"; roomId: string; details: LandingDetails }
  | { name: "error"; message: string };

/** Tiny page-flow state machine; URLs map 1:1 onto these states. */
export class Pages {
  current: Page = { name: "home" };

  goHome(): void {
    this.current = { name: "home" };
  }

  goCreate(): void {
    this.current = {
      name: "create",
      settings: defaultRoomSettings(),
      errors: {},
    };
  }

  /**
   * Validate the form; on success call `createRoom` (a POST /rooms
   * wrapper) and move to the landing page. Errors stay inline.
   */
  async submitCreate(
    settings: RoomSettings,
    createRoom: (settings: RoomSettings) => Promise<string>,
  ): Promise<void> {
    const errors = validateRoomSettings(settings);
    if (Object.keys(errors).length > 0) {
      this.current = { name: "create", settings, errors };
      return;
    }
    try {
      const roomId = await createRoom(settings);
      this.current = { name: "landing", roomId };
    } catch (e) {
      this.current = { name: "error", message: String(e) };
    }
  }

  openRoom(roomId: string, exists: boolean): void {
    if (!exists || !roomId) {
      this.current = { name: "error", message: `no such room: ${roomId}` };
      return;
    }
    this.current = { name: "landing", roomId };
  }

  enterMeeting(roomId: string, details: LandingDetails): string[] {
    const problems = validateLanding(details);
    if (problems.length === 0) {
      this.current = { name: "meeting", roomId, details };
    }
    return problems;
  }
}
