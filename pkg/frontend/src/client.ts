// Reconnecting room client. One socket, one event loop; every state
// change the UI sees arrives as a server message through this class.
//
// On reconnect the client re-joins the same room, and the server answers
// with a fresh room_state plus a resync snapshot, so the view can be
// rebuilt without any client-side caption logic.

import {
  decodeMessage,
  encodeMessage,
  makeMessage,
  Message,
  MessageType,
  TranscriptEvent,
} from "./protocol";

/** The subset of the WebSocket surface we use; `ws` satisfies it too. */
export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface RoomClientOptions {
  url: string;
  roomId: string;
  name: string;
  spokenLang: string;
  captionLang: string;
  socketFactory?: SocketFactory;
  reconnectBaseMs?: number;
  reconnectMaxMs?: number;
}

export type ConnectionStatus = "idle" | "connecting" | "open" | "closed";

export class RoomClient {
  status: ConnectionStatus = "idle";
  /** Called for every decoded server message, in arrival order. */
  onMessage: ((msg: Message) => void) | null = null;
  onStatusChange: ((status: ConnectionStatus) => void) | null = null;

  private readonly opts: Required<Omit<RoomClientOptions, "socketFactory">> & {
    socketFactory: SocketFactory;
  };
  private socket: SocketLike | null = null;
  private backoffMs: number;
  private stopped = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(options: RoomClientOptions) {
    const factory =
      options.socketFactory ??
      ((url: string) => new WebSocket(url) as unknown as SocketLike);
    this.opts = {
      reconnectBaseMs: 500,
      reconnectMaxMs: 30_000,
      ...options,
      socketFactory: factory,
    };
    this.backoffMs = this.opts.reconnectBaseMs;
  }

  connect(): void {
    this.stopped = false;
    this.setStatus("connecting");
    const socket = this.opts.socketFactory(this.opts.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoffMs = this.opts.reconnectBaseMs;
      this.setStatus("open");
      this.send("join", {
        room_id: this.opts.roomId,
        name: this.opts.name,
        spoken_lang: this.opts.spokenLang,
        caption_lang: this.opts.captionLang,
      });
    };
    socket.onmessage = (ev) => {
      let msg: Message;
      try {
        msg = decodeMessage(String(ev.data));
      } catch (e) {
        console.error("dropping undecodable server message:", e);
        return;
      }
      this.onMessage?.(msg);
    };
    socket.onerror = () => {
      /* close follows; reconnect is handled there */
    };
    socket.onclose = () => {
      this.setStatus("closed");
      if (!this.stopped) {
        this.scheduleReconnect();
      }
    };
  }

  /** Send a raw protocol message; drops silently while disconnected. */
  send(type: MessageType, payload: Record<string, unknown>): void {
    if (!this.socket || this.status !== "open") {
      return;
    }
    this.socket.send(encodeMessage(makeMessage(type, payload)));
  }

  sendTranscript(event: TranscriptEvent): void {
    this.send("transcript_event", event);
  }

  setCaptionLanguage(lang: string): void {
    this.send("set_caption_language", { lang });
  }

  gameAction(action: Record<string, unknown>): void {
    this.send("game_action", action);
  }

  /** Polite shutdown: tell the server, then stop reconnecting. */
  leave(): void {
    this.send("leave", {});
    this.close();
  }

  close(): void {
    this.stopped = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.socket = null;
  }

  /** Drop the socket without the polite leave, as a network blip would. */
  simulateDrop(): void {
    this.socket?.close();
  }

  private scheduleReconnect(): void {
    if (this.reconnectTimer !== null) {
      return;
    }
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, this.opts.reconnectMaxMs);
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      if (!this.stopped) {
        this.connect();
      }
    }, delay);
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.onStatusChange?.(status);
  }
}
