/**
 * The WebSocket JSON protocol, typed and validated in both directions.
 *
 * Client messages mirror the session log's event fields with "type" in
 * place of "kind" and no tick (the server stamps arrival).  Every
 * server message carries the tick it was emitted at.  All outbound
 * traffic goes through encodeClient(), so an invalid message can never
 * leave the client; all inbound traffic goes through parseServer(), so
 * the UI never renders unvalidated state.
 */

export type Axis = "X" | "Y" | "Z";
export type Dir = "cw" | "ccw";
export type Layer = 1 | -1;
export type FaceName = "U" | "D" | "F" | "B" | "R" | "L";
export type Phase = "BOOT" | "PROBING" | "SYNCED" | "DEGRADED";
export type Vec3 = [number, number, number];

export interface TurnMsg {
  type: "turn";
  axis: Axis;
  layer: Layer;
  dir: Dir;
}

export interface SlideMsg {
  type: "slide";
  face: FaceName;
  row: 0 | 1;
  col: 0 | 1;
}

export interface TiltMsg {
  type: "tilt";
  x: number;
  y: number;
  z: number;
}

export interface DetachMsg {
  type: "detach";
  id: number;
}

export interface AttachMsg {
  type: "attach";
  id: number;
  pos: Vec3;
  rot: [Vec3, Vec3, Vec3];
}

export interface StartMsg {
  type: "start";
}

export type ClientMsg = TurnMsg | SlideMsg | TiltMsg | DetachMsg | AttachMsg | StartMsg;

export interface RoleMsg {
  type: "role";
  tick: number;
  role: "controller" | "viewer";
  game: string;
}

export interface FacetPatch {
  face: FaceName;
  row: 0 | 1;
  col: 0 | 1;
  px: string; // base64 of 128*128*3 raw RGB bytes
}

export interface FrameMsg {
  type: "frame";
  tick: number;
  facets: FacetPatch[];
}

export interface StatusMsg {
  type: "status";
  tick: number;
  score: number;
  phase: string;
  started: boolean;
}

export interface MeshNode {
  id: number;
  phase: Phase;
}

export interface MeshMsg {
  type: "mesh";
  tick: number;
  nodes: MeshNode[];
  links: [number, number][];
  leader: number | null;
}

export interface ErrorMsg {
  type: "error";
  tick: number;
  error: string;
  role?: string;
}

export type ServerMsg = RoleMsg | FrameMsg | StatusMsg | MeshMsg | ErrorMsg;

export class ProtocolError extends Error {}

const FACE_NAMES: readonly string[] = ["U", "D", "F", "B", "R", "L"];
const PHASES: readonly string[] = ["BOOT", "PROBING", "SYNCED", "DEGRADED"];

function fail(what: string): never {
  throw new ProtocolError(what);
}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function wantNumber(x: unknown, where: string): number {
  if (typeof x !== "number" || !Number.isFinite(x)) fail(`${where}: expected a finite number`);
  return x;
}

function wantInt(x: unknown, where: string): number {
  const n = wantNumber(x, where);
  if (!Number.isInteger(n)) fail(`${where}: expected an integer`);
  return n;
}

function wantString(x: unknown, where: string): string {
  if (typeof x !== "string") fail(`${where}: expected a string`);
  return x;
}

function wantFace(x: unknown, where: string): FaceName {
  const s = wantString(x, where);
  if (!FACE_NAMES.includes(s)) fail(`${where}: bad face ${JSON.stringify(s)}`);
  return s as FaceName;
}

function wantHalf(x: unknown, where: string): 0 | 1 {
  const n = wantInt(x, where);
  if (n !== 0 && n !== 1) fail(`${where}: expected 0 or 1`);
  return n;
}

function wantVec3(x: unknown, where: string): Vec3 {
  if (!Array.isArray(x) || x.length !== 3) fail(`${where}: expected a 3-vector`);
  return [wantNumber(x[0], where), wantNumber(x[1], where), wantNumber(x[2], where)];
}

/** Throws ProtocolError unless the value is a well-formed client message. */
export function validateClient(msg: unknown): ClientMsg {
  if (!isRecord(msg)) fail("client message: expected an object");
  const type = wantString(msg.type, "client message type");
  switch (type) {
    case "start":
      return { type: "start" };
    case "turn": {
      const axis = wantString(msg.axis, "turn.axis");
      if (axis !== "X" && axis !== "Y" && axis !== "Z") fail(`turn.axis: bad axis ${axis}`);
      const layer = wantInt(msg.layer, "turn.layer");
      if (layer !== 1 && layer !== -1) fail("turn.layer: expected 1 or -1");
      const dir = wantString(msg.dir, "turn.dir");
      if (dir !== "cw" && dir !== "ccw") fail(`turn.dir: bad direction ${dir}`);
      return { type: "turn", axis, layer, dir };
    }
    case "slide":
      return {
        type: "slide",
        face: wantFace(msg.face, "slide.face"),
        row: wantHalf(msg.row, "slide.row"),
        col: wantHalf(msg.col, "slide.col"),
      };
    case "tilt": {
      const x = wantNumber(msg.x, "tilt.x");
      const y = wantNumber(msg.y, "tilt.y");
      const z = wantNumber(msg.z, "tilt.z");
      if (x === 0 && y === 0 && z === 0) fail("tilt: zero vector");
      return { type: "tilt", x, y, z };
    }
    case "detach":
      return { type: "detach", id: wantInt(msg.id, "detach.id") };
    case "attach": {
      const rot = msg.rot;
      if (!Array.isArray(rot) || rot.length !== 3) fail("attach.rot: expected a 3x3 matrix");
      return {
        type: "attach",
        id: wantInt(msg.id, "attach.id"),
        pos: wantVec3(msg.pos, "attach.pos"),
        rot: [
          wantVec3(rot[0], "attach.rot[0]"),
          wantVec3(rot[1], "attach.rot[1]"),
          wantVec3(rot[2], "attach.rot[2]"),
        ],
      };
    }
    default:
      fail(`client message: unknown type ${JSON.stringify(type)}`);
  }
}

/** Validates then serializes; the only sanctioned path to the wire. */
export function encodeClient(msg: ClientMsg): string {
  return JSON.stringify(validateClient(msg));
}

/** Parses and validates one server text frame. */
export function parseServer(text: string): ServerMsg {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    fail("server message: not JSON");
  }
  if (!isRecord(raw)) fail("server message: expected an object");
  const type = wantString(raw.type, "server message type");
  const tick = wantInt(raw.tick, `${type}.tick`);
  switch (type) {
    case "role": {
      const role = wantString(raw.role, "role.role");
      if (role !== "controller" && role !== "viewer") fail(`role.role: bad role ${role}`);
      return { type: "role", tick, role, game: wantString(raw.game, "role.game") };
    }
    case "frame": {
      if (!Array.isArray(raw.facets)) fail("frame.facets: expected an array");
      const facets = raw.facets.map((p, i): FacetPatch => {
        if (!isRecord(p)) fail(`frame.facets[${i}]: expected an object`);
        return {
          face: wantFace(p.face, `frame.facets[${i}].face`),
          row: wantHalf(p.row, `frame.facets[${i}].row`),
          col: wantHalf(p.col, `frame.facets[${i}].col`),
          px: wantString(p.px, `frame.facets[${i}].px`),
        };
      });
      return { type: "frame", tick, facets };
    }
    case "status":
      return {
        type: "status",
        tick,
        score: wantInt(raw.score, "status.score"),
        phase: wantString(raw.phase, "status.phase"),
        started: raw.started === true,
      };
    case "mesh": {
      if (!Array.isArray(raw.nodes)) fail("mesh.nodes: expected an array");
      const nodes = raw.nodes.map((n, i): MeshNode => {
        if (!isRecord(n)) fail(`mesh.nodes[${i}]: expected an object`);
        const phase = wantString(n.phase, `mesh.nodes[${i}].phase`);
        if (!PHASES.includes(phase)) fail(`mesh.nodes[${i}].phase: bad phase ${phase}`);
        return { id: wantInt(n.id, `mesh.nodes[${i}].id`), phase: phase as Phase };
      });
      if (!Array.isArray(raw.links)) fail("mesh.links: expected an array");
      const links = raw.links.map((l, i): [number, number] => {
        if (!Array.isArray(l) || l.length !== 2) fail(`mesh.links[${i}]: expected a pair`);
        return [wantInt(l[0], `mesh.links[${i}][0]`), wantInt(l[1], `mesh.links[${i}][1]`)];
      });
      const leader = raw.leader === null ? null : wantInt(raw.leader, "mesh.leader");
      return { type: "mesh", tick, nodes, links, leader };
    }
    case "error": {
      const out: ErrorMsg = { type: "error", tick, error: wantString(raw.error, "error.error") };
      if (raw.role !== undefined) out.role = wantString(raw.role, "error.role");
      return out;
    }
    default:
      fail(`server message: unknown type ${JSON.stringify(type)}`);
  }
}

/** Base64 to bytes, in both browser and node. */
export function decodeB64(s: string): Uint8Array {
  const g = globalThis as { atob?: (s: string) => string; Buffer?: { from(s: string, e: string): Uint8Array } };
  if (typeof g.atob === "function") {
    const bin = g.atob(s);
    const out = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
    return out;
  }
  if (g.Buffer) return new Uint8Array(g.Buffer.from(s, "base64"));
  throw new ProtocolError("no base64 decoder available");
}
