/**
 * Connection manager: owns the socket, the reconnect/backoff loop, and
 * the staleness clock.  Everything environment-shaped (socket factory,
 * clock, timers) is injectable so the whole lifecycle is testable
 * without a network.
 *
 * Outbound messages are validated before they touch the wire; inbound
 * text is parsed/validated before it touches the state.  While the
 * socket is down, controller inputs queue in state.pending and flush
 * in order on reconnect.
 */

import type { ClientMsg } from "./protocol.js";
import { encodeClient, parseServer } from "./protocol.js";
import type { ClientState } from "./state.js";
import { applyServer, initialState, isStale } from "./state.js";

/** The subset of the WebSocket surface the client needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export interface ClientOptions {
  url: string;
  onChange: (state: ClientState) => void;
  makeSocket?: (url: string) => SocketLike;
  now?: () => number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
  /** reconnect delays in ms; the last entry repeats */
  backoff?: number[];
  /** how often staleness is re-checked */
  staleCheckMs?: number;
}

const DEFAULT_BACKOFF = [500, 1000, 2000, 4000, 8000];

export class CubeClient {
  readonly state: ClientState = initialState();
  /** true while the stale banner should show */
  stale = false;

  private readonly opts: Required<ClientOptions>;
  private socket: SocketLike | null = null;
  private attempts = 0;
  private closed = false;
  private reconnectTimer: unknown = null;
  private staleTimer: unknown = null;

  constructor(opts: ClientOptions) {
    this.opts = {
      makeSocket: (url: string) =>
        new (globalThis as unknown as { WebSocket: new (u: string) => SocketLike }).WebSocket(url),
      now: () => Date.now(),
      setTimer: (fn, ms) => setTimeout(fn, ms),
      clearTimer: (h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]),
      backoff: DEFAULT_BACKOFF,
      staleCheckMs: 250,
      ...opts,
    };
  }

  connect(): void {
    this.closed = false;
    this.open();
    this.armStaleCheck();
  }

  /** Validates, then sends now or queues until the socket is back. */
  send(msg: ClientMsg): void {
    const text = encodeClient(msg);
    if (this.socket && this.state.connected) {
      this.socket.send(text);
    } else {
      this.state.pending.push(msg);
      this.notify();
    }
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) this.opts.clearTimer(this.reconnectTimer);
    if (this.staleTimer !== null) this.opts.clearTimer(this.staleTimer);
    this.reconnectTimer = null;
    this.staleTimer = null;
    this.socket?.close();
    this.socket = null;
  }

  private open(): void {
    const ws = this.opts.makeSocket(this.opts.url);
    this.socket = ws;
    ws.onopen = () => {
      this.attempts = 0;
      this.state.connected = true;
      const queued = this.state.pending.splice(0);
      for (const msg of queued) ws.send(encodeClient(msg));
      this.notify();
    };
    ws.onmessage = (ev) => {
      if (typeof ev.data !== "string") return;
      try {
        applyServer(this.state, parseServer(ev.data), this.opts.now());
      } catch (e) {
        this.state.errors.push(`protocol: ${(e as Error).message}`);
      }
      this.notify();
    };
    const onDown = () => {
      if (this.socket !== ws) return; // an older socket's tail events
      this.socket = null;
      this.state.connected = false;
      this.notify();
      this.scheduleReconnect();
    };
    ws.onclose = onDown;
    ws.onerror = onDown;
  }

  private scheduleReconnect(): void {
    if (this.closed || this.reconnectTimer !== null) return;
    const delays = this.opts.backoff;
    const delay = delays[Math.min(this.attempts, delays.length - 1)]!;
    this.attempts += 1;
    this.reconnectTimer = this.opts.setTimer(() => {
      this.reconnectTimer = null;
      if (!this.closed) this.open();
    }, delay);
  }

  private armStaleCheck(): void {
    if (this.staleTimer !== null) return;
    const tickCheck = () => {
      const nowStale = isStale(this.state, this.opts.now());
      if (nowStale !== this.stale) {
        this.stale = nowStale;
        this.notify();
      }
      if (!this.closed) this.staleTimer = this.opts.setTimer(tickCheck, this.opts.staleCheckMs);
      else this.staleTimer = null;
    };
    this.staleTimer = this.opts.setTimer(tickCheck, this.opts.staleCheckMs);
  }

  private notify(): void {
    this.opts.onChange(this.state);
  }
}
