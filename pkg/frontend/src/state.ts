/**
 * Client-side session state: the last server-acknowledged facts and
 * nothing else.  The store never simulates gameplay; it only reflects
 * messages already received, so the view can never get ahead of the
 * server.  Mutations happen exclusively through applyServer() and the
 * connection bookkeeping hooks in the socket client.
 */

import type { ClientMsg, MeshMsg, ServerMsg } from "./protocol.js";
import { decodeB64 } from "./protocol.js";
import { FACET_PX, facetIndex } from "./layout.js";

export const STALE_AFTER_MS = 2000;
const ERROR_LOG_LIMIT = 20;
const FACET_BYTES = FACET_PX * FACET_PX * 3;

export interface ClientState {
  connected: boolean;
  role: "controller" | "viewer" | null;
  game: string | null;
  tick: number;
  score: number;
  phase: string;
  started: boolean;
  /** facet index -> latest raw RGB bytes (server-acknowledged only) */
  frames: Map<number, Uint8Array>;
  /** facet indexes repainted by the most recent frame message */
  lastChanged: number[];
  lastFrameAt: number | null;
  mesh: Pick<MeshMsg, "nodes" | "links" | "leader"> | null;
  errors: string[];
  /** inputs accepted while disconnected, flushed on reconnect */
  pending: ClientMsg[];
}

export function initialState(): ClientState {
  return {
    connected: false,
    role: null,
    game: null,
    tick: 0,
    score: 0,
    phase: "",
    started: false,
    frames: new Map(),
    lastChanged: [],
    lastFrameAt: null,
    mesh: null,
    errors: [],
    pending: [],
  };
}

function sameBytes(a: Uint8Array | undefined, b: Uint8Array): boolean {
  if (!a || a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) if (a[i] !== b[i]) return false;
  return true;
}

/** Folds one validated server message into the state (in place). */
export function applyServer(s: ClientState, msg: ServerMsg, nowMs: number): void {
  s.tick = msg.tick;
  switch (msg.type) {
    case "role":
      s.role = msg.role;
      s.game = msg.game;
      return;
    case "status":
      s.score = msg.score;
      s.phase = msg.phase;
      s.started = msg.started;
      return;
    case "mesh":
      s.mesh = { nodes: msg.nodes, links: msg.links, leader: msg.leader };
      return;
    case "error":
      s.errors.push(`tick ${msg.tick}: ${msg.error}`);
      if (s.errors.length > ERROR_LOG_LIMIT) s.errors.splice(0, s.errors.length - ERROR_LOG_LIMIT);
      return;
    case "frame": {
      s.lastFrameAt = nowMs;
      const changed: number[] = [];
      for (const patch of msg.facets) {
        const px = decodeB64(patch.px);
        if (px.length !== FACET_BYTES) {
          s.errors.push(`frame: facet payload of ${px.length} bytes dropped`);
          continue;
        }
        const idx = facetIndex(patch);
        if (!sameBytes(s.frames.get(idx), px)) {
          s.frames.set(idx, px);
          changed.push(idx);
        }
      }
      s.lastChanged = changed;
      return;
    }
  }
}

/**
 * True when frames have stopped arriving for 2 s.  Deliberately not
 * gated on the socket: a dropped connection must raise the banner too.
 * Before the first frame there is nothing to be stale relative to.
 */
export function isStale(s: ClientState, nowMs: number): boolean {
  if (s.lastFrameAt === null) return false;
  return nowMs - s.lastFrameAt >= STALE_AFTER_MS;
}

/** Facet indexes whose bytes differ between two frame snapshots. */
export function diffFrames(
  before: Map<number, Uint8Array>,
  after: Map<number, Uint8Array>,
): number[] {
  const out: number[] = [];
  const keys = new Set([...before.keys(), ...after.keys()]);
  for (const k of [...keys].sort((a, b) => a - b)) {
    const a = before.get(k);
    const b = after.get(k);
    if (a === undefined || b === undefined) {
      if (a !== b) out.push(k);
    } else if (!sameBytes(a, b)) {
      out.push(k);
    }
  }
  return out;
}

/** Deep copy of the current frame set (for diffing across ticks). */
export function snapshotFrames(s: ClientState): Map<number, Uint8Array> {
  const out = new Map<number, Uint8Array>();
  for (const [k, v] of s.frames) out.set(k, new Uint8Array(v));
  return out;
}
