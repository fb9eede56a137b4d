import { expect, test } from "vitest";

import type { TiltMsg } from "../src/protocol";
import { DEAD_ZONE, MIN_INTERVAL_MS, TiltPad } from "../src/tilt";

function pad(overrides: Partial<ConstructorParameters<typeof TiltPad>[0]> = {}) {
  const sent: TiltMsg[] = [];
  let now = 0;
  const p = new TiltPad({
    emit: (m) => sent.push(m),
    now: () => now,
    ...overrides,
  });
  return { p, sent, tick: (ms: number) => (now += ms) };
}

test("the pad at rest emits no message", () => {
  const { p, sent } = pad();
  expect(p.input(0, 0)).toBeNull();
  expect(p.input(DEAD_ZONE * 0.9, 0)).toBeNull();
  expect(sent).toHaveLength(0);
});

test("a displaced pad emits a unit tilt vector", () => {
  const { p, sent } = pad();
  const msg = p.input(1, 0);
  expect(msg).toEqual({ type: "tilt", x: 1, y: 0, z: 0 });
  expect(sent).toHaveLength(1);
  const n = Math.hypot(msg!.x, msg!.y, msg!.z);
  expect(n).toBeCloseTo(1, 12);
});

test("screen-down drag means tilt toward negative up-axis", () => {
  const { p } = pad();
  const msg = p.input(0, 1)!; // dy positive downward
  expect(msg.x).toBeCloseTo(0, 12);
  expect(msg.y).toBe(-1);
  expect(msg.z).toBeCloseTo(0, 12);
});

test("a diagonal drag normalizes", () => {
  const { p } = pad();
  const msg = p.input(1, 1)!;
  expect(msg.x).toBeCloseTo(Math.SQRT1_2, 12);
  expect(msg.y).toBeCloseTo(-Math.SQRT1_2, 12);
  expect(msg.z).toBe(0);
});

test("emissions are throttled to 20 Hz", () => {
  const { p, sent, tick } = pad();
  expect(p.input(1, 0)).not.toBeNull();
  expect(p.input(1, 0)).toBeNull(); // same instant: suppressed
  tick(MIN_INTERVAL_MS - 1);
  expect(p.input(1, 0)).toBeNull(); // still inside the window
  tick(1);
  expect(p.input(1, 0)).not.toBeNull();
  expect(sent).toHaveLength(2);
});

test("the camera basis steers the emitted vector", () => {
  const { p, tick } = pad();
  // looking at the R face: screen right is -Z, screen up is +Y
  const basis = { right: [0, 0, -1] as [number, number, number], up: [0, 1, 0] as [number, number, number] };
  const msg = p.input(1, 0, basis);
  expect(msg).toEqual({ type: "tilt", x: 0, y: 0, z: -1 });
  tick(MIN_INTERVAL_MS);
  const msg2 = p.input(0, -1, basis); // drag up: tilt toward +Y
  expect(msg2).toEqual({ type: "tilt", x: 0, y: 1, z: 0 });
});

test("suppressed inputs do not reset the throttle window", () => {
  const { p, tick } = pad();
  expect(p.input(1, 0)).not.toBeNull();
  tick(MIN_INTERVAL_MS / 2);
  expect(p.input(0.05, 0)).toBeNull(); // dead zone, should not delay the next send
  tick(MIN_INTERVAL_MS / 2);
  expect(p.input(1, 0)).not.toBeNull();
});
