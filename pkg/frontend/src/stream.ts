import type { Frame } from "./types.js";

export type StreamStatus = "connecting" | "open" | "reconnecting" | "closed";

interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export interface StreamOptions {
  onFrame: (frame: Frame) => void;
  onStatus?: (status: StreamStatus) => void;
  onError?: (message: string) => void;
  socketFactory?: (url: string) => SocketLike;
  schedule?: (fn: () => void, ms: number) => void;
  backoffMs?: number[];
}

const DEFAULT_BACKOFF = [250, 500, 1000, 2000, 4000];

// One duplex socket per session; goals go out, frames come back. A dropped
// connection flips to a visible "reconnecting" state and retries with
// capped exponential backoff.
export class GoalStream {
  status: StreamStatus = "connecting";
  private socket: SocketLike | null = null;
  private attempts = 0;
  private closedByUser = false;
  private readonly backoff: number[];
  private readonly makeSocket: (url: string) => SocketLike;
  private readonly schedule: (fn: () => void, ms: number) => void;

  constructor(
    private url: string,
    private opts: StreamOptions,
  ) {
    this.backoff = opts.backoffMs ?? DEFAULT_BACKOFF;
    this.makeSocket =
      opts.socketFactory ??
      ((u) => new WebSocket(u) as unknown as SocketLike);
    this.schedule = opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
  }

  connect(): void {
    this.setStatus(this.attempts === 0 ? "connecting" : "reconnecting");
    const sock = this.makeSocket(this.url);
    this.socket = sock;
    sock.onopen = () => {
      this.attempts = 0;
      this.setStatus("open");
    };
    sock.onmessage = (ev) => {
      const payload = JSON.parse(ev.data);
      if (payload.error) {
        this.opts.onError?.(String(payload.error));
        return;
      }
      this.opts.onFrame(payload as Frame);
    };
    sock.onclose = () => {
      this.socket = null;
      if (this.closedByUser) {
        this.setStatus("closed");
        return;
      }
      const wait = this.backoff[Math.min(this.attempts, this.backoff.length - 1)];
      this.attempts += 1;
      this.setStatus("reconnecting");
      this.schedule(() => {
        if (!this.closedByUser) this.connect();
      }, wait);
    };
    sock.onerror = () => {
      /* close follows; reconnect handled there */
    };
  }

  // Returns false when the socket is down (the goal is dropped, not queued:
  // a stale cursor position is worthless after reconnect).
  sendGoal(x: number, y: number, z: number): boolean {
    if (this.status !== "open" || this.socket === null) return false;
    this.socket.send(JSON.stringify({ x, y, z }));
    return true;
  }

  close(): void {
    this.closedByUser = true;
    this.socket?.close();
    if (this.socket === null) this.setStatus("closed");
  }

  private setStatus(status: StreamStatus): void {
    this.status = status;
    this.opts.onStatus?.(status);
  }
}
