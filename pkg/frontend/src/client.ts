// Gateway client: WebSocket, hello handshake, strictly increasing command
// seq, reconnect with backoff. The socket constructor is injectable so
// tests can run under Node with the ws package.

import {
  CommandKind,
  PROTOCOL_VERSION,
  ServerMsg,
  decodeLine,
  encodeCommand,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: any) => void) | null;
  onmessage: ((ev: { data: any }) => void) | null;
  onclose: ((ev?: any) => void) | null;
  onerror: ((ev?: any) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

const BACKOFF_START_MS = 250;
const BACKOFF_MAX_MS = 4000;

export interface ClientHandlers {
  onMessage?: (msg: ServerMsg) => void;
  onStatus?: (status: "connecting" | "connected" | "retrying" | "failed") => void;
  onSent?: (seq: number, kind: CommandKind, args: object) => void;
}

export class GatewayClient {
  private makeSocket: SocketFactory;
  private handlers: ClientHandlers;
  private socket: SocketLike | null = null;
  private seq = 0;
  private t0 = 0;
  private backoff = BACKOFF_START_MS;
  private retryTimer: any = null;
  private stopped = true;
  private url = "";
  connected = false;

  constructor(handlers: ClientHandlers = {}, makeSocket?: SocketFactory) {
    this.handlers = handlers;
    this.makeSocket = makeSocket ?? ((url) => new WebSocket(url) as unknown as SocketLike);
  }

  connect(url: string) {
    this.url = url;
    this.stopped = false;
    this.open();
  }

  private open() {
    this.handlers.onStatus?.("connecting");
    let sock: SocketLike;
    try {
      sock = this.makeSocket(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.socket = sock;
    sock.onopen = () => {
      this.connected = true;
      this.backoff = BACKOFF_START_MS;
      this.t0 = Date.now();
      this.handlers.onStatus?.("connected");
    };
    sock.onmessage = (ev) => {
      const text = typeof ev.data === "string" ? ev.data : String(ev.data);
      for (const line of text.split("\n")) {
        const msg = decodeLine(line);
        if (!msg) continue;
        if (msg.type === "hello" && msg.protocol !== PROTOCOL_VERSION) {
          // incompatible server; surface it and stop retrying
          this.handlers.onMessage?.({
            type: "error",
            message: `protocol version mismatch: server speaks ${msg.protocol}, this console speaks ${PROTOCOL_VERSION}`,
          });
          this.disconnect();
          this.handlers.onStatus?.("failed");
          return;
        }
        this.handlers.onMessage?.(msg);
      }
    };
    sock.onerror = () => {
      /* onclose follows; retry happens there */
    };
    sock.onclose = () => {
      this.connected = false;
      this.socket = null;
      if (!this.stopped) this.scheduleRetry();
    };
  }

  private scheduleRetry() {
    this.handlers.onStatus?.("retrying");
    clearTimeout(this.retryTimer);
    this.retryTimer = setTimeout(() => this.open(), this.backoff);
    this.backoff = Math.min(this.backoff * 2, BACKOFF_MAX_MS);
  }

  /** Send one command; returns its seq, or -1 when not connected. */
  send(kind: CommandKind, args: object = {}): number {
    if (!this.connected || !this.socket) return -1;
    const seq = this.seq++;
    this.socket.send(encodeCommand(seq, Date.now() - this.t0, kind, args));
    this.handlers.onSent?.(seq, kind, args);
    return seq;
  }

  disconnect() {
    this.stopped = true;
    clearTimeout(this.retryTimer);
    this.connected = false;
    const sock = this.socket;
    this.socket = null;
    if (sock) {
      sock.onclose = null;
      try {
        sock.close();
      } catch {
        /* already gone */
      }
    }
  }
}
