/**
 * Virtual tilt pad: a 2D stick whose displacement becomes a normalized
 * 3D tilt vector.  The pad at rest (or within the dead zone) emits
 * nothing, and emissions are throttled to at most one message per
 * 50 ms (20 Hz), matching the server's tick rate.
 *
 * The 2D-to-3D mapping uses a camera basis so the pad always means
 * "tilt toward where I drag on screen": tilt = right*dx - up*dy with
 * dy positive downward.  With the default basis (x right, y up) a
 * rightward drag is +X and an upward drag is +Y.
 */

import type { TiltMsg, Vec3 } from "./protocol.js";

export const DEAD_ZONE = 0.15;
export const MIN_INTERVAL_MS = 50;

export interface TiltPadOptions {
  emit: (msg: TiltMsg) => void;
  now?: () => number;
  deadZone?: number;
  minIntervalMs?: number;
}

export interface CameraBasis {
  right: Vec3;
  up: Vec3;
}

const DEFAULT_BASIS: CameraBasis = { right: [1, 0, 0], up: [0, 1, 0] };

export class TiltPad {
  private readonly emit: (msg: TiltMsg) => void;
  private readonly now: () => number;
  private readonly deadZone: number;
  private readonly minIntervalMs: number;
  private lastSentAt = -Infinity;

  constructor(opts: TiltPadOptions) {
    this.emit = opts.emit;
    this.now = opts.now ?? (() => Date.now());
    this.deadZone = opts.deadZone ?? DEAD_ZONE;
    this.minIntervalMs = opts.minIntervalMs ?? MIN_INTERVAL_MS;
  }

  /**
   * Pad displacement in [-1, 1]^2, dy positive downward (screen
   * convention).  Returns the message sent, or null when suppressed by
   * the dead zone or the rate limit.
   */
  input(dx: number, dy: number, basis: CameraBasis = DEFAULT_BASIS): TiltMsg | null {
    const mag = Math.hypot(dx, dy);
    if (mag < this.deadZone) return null;
    const t = this.now();
    if (t - this.lastSentAt < this.minIntervalMs) return null;
    const v: Vec3 = [
      basis.right[0] * dx - basis.up[0] * dy,
      basis.right[1] * dx - basis.up[1] * dy,
      basis.right[2] * dx - basis.up[2] * dy,
    ];
    const n = Math.hypot(v[0], v[1], v[2]);
    if (n === 0) return null; // degenerate basis; nothing sensible to send
    const msg: TiltMsg = { type: "tilt", x: v[0] / n, y: v[1] / n, z: v[2] / n };
    this.lastSentAt = t;
    this.emit(msg);
    return msg;
  }
}
