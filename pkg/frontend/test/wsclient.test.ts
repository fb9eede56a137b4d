import { expect, test } from "vitest";

import { allFacets } from "../src/layout";
import { ProtocolError } from "../src/protocol";
import type { ClientMsg } from "../src/protocol";
import type { SocketLike } from "../src/wsclient";
import { CubeClient } from "../src/wsclient";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.closed = true;
  }
  open(): void {
    this.onopen?.();
  }
  receive(obj: unknown): void {
    this.onmessage?.({ data: typeof obj === "string" ? obj : JSON.stringify(obj) });
  }
  drop(): void {
    this.onclose?.();
  }
}

class FakeTimers {
  now = 0;
  private queue: { at: number; fn: () => void; id: number }[] = [];
  private nextId = 1;

  set = (fn: () => void, ms: number): unknown => {
    const id = this.nextId++;
    this.queue.push({ at: this.now + ms, fn, id });
    return id;
  };

  clear = (h: unknown): void => {
    this.queue = this.queue.filter((q) => q.id !== h);
  };

  advance(ms: number): void {
    const until = this.now + ms;
    for (;;) {
      const due = this.queue.filter((q) => q.at <= until).sort((a, b) => a.at - b.at)[0];
      if (!due) break;
      this.queue = this.queue.filter((q) => q.id !== due.id);
      this.now = due.at;
      due.fn();
    }
    this.now = until;
  }
}

function makeHarness(backoff = [100, 200, 400]) {
  const timers = new FakeTimers();
  const sockets: FakeSocket[] = [];
  let changes = 0;
  const client = new CubeClient({
    url: "ws://test/ws",
    onChange: () => changes++,
    makeSocket: () => {
      const s = new FakeSocket();
      sockets.push(s);
      return s;
    },
    now: () => timers.now,
    setTimer: timers.set,
    clearTimer: timers.clear,
    backoff,
    staleCheckMs: 100,
  });
  return { client, timers, sockets, changes: () => changes };
}

const FULL_PX = Buffer.alloc(128 * 128 * 3, 9).toString("base64");

function frameText(tick: number): string {
  return JSON.stringify({
    type: "frame",
    tick,
    facets: allFacets().map((a) => ({ face: a.face, row: a.row, col: a.col, px: FULL_PX })),
  });
}

test("connect, receive role, and reflect it in state", () => {
  const { client, sockets } = makeHarness();
  client.connect();
  expect(sockets).toHaveLength(1);
  sockets[0]!.open();
  expect(client.state.connected).toBe(true);
  sockets[0]!.receive({ type: "role", tick: 0, role: "controller", game: "wordmatch" });
  expect(client.state.role).toBe("controller");
  expect(client.state.game).toBe("wordmatch");
});

test("sends validate before the wire and invalid ones never leave", () => {
  const { client, sockets } = makeHarness();
  client.connect();
  sockets[0]!.open();
  client.send({ type: "detach", id: 3 });
  expect(sockets[0]!.sent).toEqual([JSON.stringify({ type: "detach", id: 3 })]);
  expect(() => client.send({ type: "turn", axis: "W" } as unknown as ClientMsg)).toThrow(
    ProtocolError,
  );
  expect(sockets[0]!.sent).toHaveLength(1);
});

test("inputs while disconnected queue and flush in order on reconnect", () => {
  const { client, timers, sockets } = makeHarness();
  client.connect();
  sockets[0]!.open();
  sockets[0]!.drop();
  expect(client.state.connected).toBe(false);
  client.send({ type: "start" });
  client.send({ type: "turn", axis: "X", layer: 1, dir: "cw" });
  expect(client.state.pending).toHaveLength(2);
  timers.advance(100); // first backoff step
  expect(sockets).toHaveLength(2);
  sockets[1]!.open();
  expect(client.state.pending).toHaveLength(0);
  expect(sockets[1]!.sent.map((t) => JSON.parse(t).type)).toEqual(["start", "turn"]);
});

test("reconnect backoff escalates then resets after a successful open", () => {
  const { client, timers, sockets } = makeHarness([100, 200, 400]);
  client.connect();
  sockets[0]!.open();
  sockets[0]!.drop();
  timers.advance(99);
  expect(sockets).toHaveLength(1);
  timers.advance(1); // attempt 1 after 100 ms
  expect(sockets).toHaveLength(2);
  sockets[1]!.drop();
  timers.advance(199);
  expect(sockets).toHaveLength(2);
  timers.advance(1); // attempt 2 after 200 ms
  expect(sockets).toHaveLength(3);
  sockets[2]!.drop();
  timers.advance(400); // attempt 3 after 400 ms (cap)
  expect(sockets).toHaveLength(4);
  sockets[3]!.open(); // success resets the ladder
  sockets[3]!.drop();
  timers.advance(100);
  expect(sockets).toHaveLength(5);
});

test("malformed server messages are logged, not thrown", () => {
  const { client, sockets } = makeHarness();
  client.connect();
  sockets[0]!.open();
  sockets[0]!.receive("not json at all");
  sockets[0]!.receive({ type: "mystery", tick: 1 });
  expect(client.state.errors).toHaveLength(2);
  expect(client.state.errors[0]).toContain("protocol:");
});

test("stale flag rises 2 s after the last frame and clears on the next", () => {
  const { client, timers, sockets } = makeHarness();
  client.connect();
  sockets[0]!.open();
  sockets[0]!.receive(frameText(1));
  expect(client.stale).toBe(false);
  timers.advance(1900);
  expect(client.stale).toBe(false);
  timers.advance(200); // 2.1 s since the frame
  expect(client.stale).toBe(true);
  sockets[0]!.receive(frameText(2));
  timers.advance(100); // next stale check
  expect(client.stale).toBe(false);
});

test("a dropped connection raises the stale banner within 2 s", () => {
  const { client, timers, sockets } = makeHarness();
  client.connect();
  sockets[0]!.open();
  sockets[0]!.receive(frameText(1));
  expect(client.stale).toBe(false);
  sockets[0]!.drop();
  timers.advance(2000);
  expect(client.stale).toBe(true);
});

test("close() stops reconnecting for good", () => {
  const { client, timers, sockets } = makeHarness();
  client.connect();
  sockets[0]!.open();
  client.close();
  expect(sockets[0]!.closed).toBe(true);
  timers.advance(10_000);
  expect(sockets).toHaveLength(1);
});
