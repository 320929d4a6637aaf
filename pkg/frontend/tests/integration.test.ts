// @vitest-environment jsdom
//
// End-to-end round against the real Python server: two clients join a
// room over WebSocket, play a cooperative game round to completion using
// the text-fallback input, then one client drops and reconnects and the
// resync snapshot must restore the identical transcript text.

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { request } from "node:http";
import { tmpdir } from "node:os";
import { join } from "node:path";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { MeetingView } from "../src/meetingView";
import { RoomClient, SocketLike } from "../src/client";
import { TextFallbackInput } from "../src/textInput";

const PORT = 18000 + Math.floor(Math.random() * 2000);
const BASE = `http://127.0.0.1:${PORT}`;

const WORDLIST = [
  {
    word_id: "w-raccoon",
    forms: {
      en: { primary: "raccoon", accepted: [], forbidden: [] },
      zh: { primary: "浣熊", accepted: [], forbidden: [] },
    },
  },
  {
    word_id: "w-bridge",
    forms: {
      en: { primary: "bridge", accepted: [], forbidden: [] },
      zh: { primary: "桥", accepted: [], forbidden: [] },
    },
  },
  {
    word_id: "w-eyelash",
    forms: {
      en: { primary: "eyelash", accepted: [], forbidden: ["eyelashes"] },
      zh: { primary: "睫毛", accepted: [], forbidden: [] },
    },
  },
];
const WORD_BY_ID = new Map(
  WORDLIST.map((c) => [c.word_id, c.forms.en.primary]),
);

let server: ChildProcess;
let workDir: string;

function postJson(path: string, body: unknown): Promise<{ status: number; json: any }> {
  return new Promise((resolve, reject) => {
    const data = JSON.stringify(body);
    const req = request(
      `${BASE}${path}`,
      {
        method: "POST",
        headers: { "content-type": "application/json", "content-length": Buffer.byteLength(data) },
      },
      (res) => {
        let text = "";
        res.on("data", (chunk) => (text += chunk));
        res.on("end", () =>
          resolve({ status: res.statusCode ?? 0, json: text ? JSON.parse(text) : null }),
        );
      },
    );
    req.on("error", reject);
    req.end(data);
  });
}

async function waitFor(
  condition: () => boolean,
  what: string,
  timeoutMs = 10_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!condition()) {
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((r) => setTimeout(r, 20));
  }
}

function connectClient(roomId: string, name: string): {
  client: RoomClient;
  view: MeetingView;
} {
  const client = new RoomClient({
    url: `ws://127.0.0.1:${PORT}/ws`,
    roomId,
    name,
    spokenLang: "en",
    captionLang: "en",
    socketFactory: (url) => new WebSocket(url) as unknown as SocketLike,
    reconnectBaseMs: 50,
  });
  const root = document.createElement("div");
  document.body.appendChild(root);
  const view = new MeetingView(root, client);
  client.connect();
  return { client, view };
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "webui-e2e-"));
  const wordlistPath = join(workDir, "words.jsonl");
  writeFileSync(
    wordlistPath,
    WORDLIST.map((c) => JSON.stringify(c)).join("\n") + "\n",
  );
  const configPath = join(workDir, "config.json");
  writeFileSync(configPath, JSON.stringify({ wordlist: wordlistPath }));

  server = spawn(
    "python3",
    ["-m", "meetcap.cli", "serve", "--host", "127.0.0.1", "--port", String(PORT), "--config", configPath, "--backend", "identity"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stderr?.on("data", (d) => console.error("[server]", String(d).trim()));

  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const res = await postJson("/rooms", { mask_k: 0 });
      if (res.status === 200) break;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("server did not come up");
    await new Promise((r) => setTimeout(r, 100));
  }
}, 30_000);

afterAll(() => {
  server?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

describe("two clients, one cooperative round", () => {
  it("plays a full round and survives a reconnect", async () => {
    // bias off and a small mask so partial captions have an unstable,
    // faded tail we can observe on screen
    const room = await postJson("/rooms", { bias_enabled: false, mask_k: 1 });
    expect(room.status).toBe(200);
    const roomId: string = room.json.room_id;

    const ana = connectClient(roomId, "ana");
    const bo = connectClient(roomId, "bo");
    await waitFor(
      () => ana.view.state.participantId !== null && bo.view.state.participantId !== null,
      "both joins",
    );
    await waitFor(
      () => ana.view.state.participants.length === 2,
      "membership broadcast",
    );

    // A virtual session clock keeps the 4-minute round timer meaningful.
    let clock = 1_000;
    const inputFor = (who: { client: RoomClient; view: MeetingView }) =>
      new TextFallbackInput({
        sessionId: roomId,
        speakerId: who.view.state.participantId!,
        lang: "en",
        sendEvent: (e) => who.client.sendTranscript(e),
        stepMs: 0,
        now: () => clock,
      });
    const inputs = new Map([
      [ana, inputFor(ana)],
      [bo, inputFor(bo)],
    ]);
    const speak = async (who: { client: RoomClient; view: MeetingView }, text: string) => {
      const events = await inputs.get(who)!.submit(text);
      clock += events.length * 250 + 500;
      await waitFor(
        () =>
          [...bo.view.state.captions.values()].some(
            (u) => u.utterance_id === events[0].utterance_id && u.is_final,
          ),
        `captions for "${text}"`,
      );
    };

    ana.client.gameAction({
      action: "start",
      mode: "cooperative",
      describer: ana.view.state.participantId,
      seed: 0,
      now_ms: 0,
    });
    await waitFor(() => ana.view.state.game.currentWordId !== null, "word_assigned");
    // role gating: the guesser never learns the word
    expect(bo.view.state.game.currentWordId).toBeNull();
    expect(bo.view.state.game.active).toBe(true);

    const guessCurrent = async () => {
      await waitFor(
        () => ana.view.state.game.currentWordId !== null,
        "next word_assigned",
      );
      const wordId = ana.view.state.game.currentWordId!;
      const word = WORD_BY_ID.get(wordId)!;
      await speak(ana, "you know what this is");
      const scoreBefore = bo.view.state.game.teamScore;
      await speak(bo, `is it a ${word}`);
      await waitFor(
        () => bo.view.state.game.teamScore === scoreBefore + 1,
        `correct_guess for ${wordId}`,
      );
    };

    await guessCurrent(); // card 1
    ana.client.gameAction({ action: "skip", now_ms: clock });
    await waitFor(
      () => ana.view.state.game.skipsUsed === 1,
      "skip acknowledged",
    );
    await guessCurrent(); // card 3 (card 2 was skipped)
    await waitFor(() => bo.view.state.game.over, "round end");
    expect(bo.view.state.game.roundEndedReason).toBe("deck exhausted");
    expect(bo.view.state.game.teamScore).toBe(2);
    expect(ana.view.state.game.teamScore).toBe(2);

    // Caption rendering stayed inside the advertised window geometry,
    // and unstable tails were visibly faded at some point.
    const anaSeesBo = ana.view.captionViewFor(bo.view.state.participantId!);
    for (const line of anaSeesBo.visibleLines()) {
      expect(line.length).toBeLessThanOrEqual(60);
    }
    expect(
      ana.view.root.querySelectorAll(".caption-line").length,
    ).toBeGreaterThan(0);

    // Transcript panels agree between the two clients.
    await waitFor(
      () => ana.view.transcriptText() === bo.view.transcriptText(),
      "transcript agreement",
    );
    const before = bo.view.transcriptText();
    expect(before.length).toBeGreaterThan(0);

    // Drop bo's socket; the client reconnects, re-joins, and the resync
    // snapshot must restore the identical on-screen transcript.
    bo.client.simulateDrop();
    await waitFor(() => bo.client.status === "open", "reconnect");
    await waitFor(
      () => bo.view.transcriptText() === before,
      "resync restores transcript",
    );

    ana.client.leave();
    bo.client.leave();
  }, 60_000);

  it("shows faded pending text for unstable caption tails", async () => {
    const room = await postJson("/rooms", { bias_enabled: false, mask_k: 0 });
    const roomId: string = room.json.room_id;
    const ana = connectClient(roomId, "ana");
    const bo = connectClient(roomId, "bo");
    await waitFor(
      () => ana.view.state.participantId !== null && bo.view.state.participantId !== null,
      "joins",
    );

    let sawPending = false;
    const origHandle = bo.view.handleMessage.bind(bo.view);
    bo.client.onMessage = (msg) => {
      origHandle(msg);
      if (bo.view.root.querySelector(".caption-pending")) {
        sawPending = true;
      }
    };

    const input = new TextFallbackInput({
      sessionId: roomId,
      speakerId: ana.view.state.participantId!,
      lang: "en",
      sendEvent: (e) => ana.client.sendTranscript(e),
      stepMs: 0,
      now: () => 2_000,
    });
    await input.submit("slow and steady words keep arriving here");
    await waitFor(
      () => [...bo.view.state.captions.values()].some((u) => u.is_final),
      "final caption",
    );
    expect(sawPending).toBe(true);
    // once final, nothing is faded any more
    expect(bo.view.root.querySelector(".caption-pending")).toBeNull();

    ana.client.leave();
    bo.client.leave();
  }, 30_000);
});
