/**
 * Shared-surface coordinate conventions, mirrored from the served
 * protocol: face names and their outward normals, facet indexing
 * (face*4 + row*2 + col), the 4x3 cross net, and the frame basis each
 * face's pixels are written in (u rightward, v downward, viewed from
 * outside).  These constants define what the wire coordinates MEAN,
 * so the client must agree on them to aim inputs and place pixels.
 */

import type { Axis, Dir, FaceName, Layer, TurnMsg, Vec3 } from "./protocol.js";

export const FACE_ORDER: readonly FaceName[] = ["U", "D", "F", "B", "R", "L"];

export const FACE_NORMAL: Record<FaceName, Vec3> = {
  U: [0, 1, 0],
  D: [0, -1, 0],
  F: [0, 0, 1],
  B: [0, 0, -1],
  R: [1, 0, 0],
  L: [-1, 0, 0],
};

/** (u, v) pixel basis per face; u x v points into the cube. */
export const FACE_FRAME: Record<FaceName, [Vec3, Vec3]> = {
  U: [[1, 0, 0], [0, 0, 1]],
  D: [[1, 0, 0], [0, 0, -1]],
  F: [[1, 0, 0], [0, -1, 0]],
  B: [[-1, 0, 0], [0, -1, 0]],
  R: [[0, 0, -1], [0, -1, 0]],
  L: [[0, 0, 1], [0, -1, 0]],
};

export const FACET_PX = 128; // one display is 128x128
export const FACETS_TOTAL = 24;

export interface FacetAddr {
  face: FaceName;
  row: 0 | 1;
  col: 0 | 1;
}

export function facetIndex(a: FacetAddr): number {
  return FACE_ORDER.indexOf(a.face) * 4 + a.row * 2 + a.col;
}

export function facetOfIndex(i: number): FacetAddr {
  if (!Number.isInteger(i) || i < 0 || i >= FACETS_TOTAL) throw new Error(`bad facet index ${i}`);
  const face = FACE_ORDER[i >> 2] as FaceName;
  return { face, row: ((i >> 1) & 1) as 0 | 1, col: (i & 1) as 0 | 1 };
}

export function allFacets(): FacetAddr[] {
  const out: FacetAddr[] = [];
  for (let i = 0; i < FACETS_TOTAL; i++) out.push(facetOfIndex(i));
  return out;
}

/** Cross net: grid (gridRow, gridCol) of each face in a 4-wide, 3-tall layout. */
export const NET_SLOT: Record<FaceName, [number, number]> = {
  U: [0, 1],
  L: [1, 0],
  F: [1, 1],
  R: [1, 2],
  B: [1, 3],
  D: [2, 1],
};

/**
 * A face's clockwise arrow turns the layer under that face about the
 * face's axis: the axis is the normal's nonzero component, the layer
 * its sign.  Clicking U's CW arrow emits axis Y, layer 1, dir cw.
 */
export function faceTurn(face: FaceName, dir: Dir): TurnMsg {
  const n = FACE_NORMAL[face];
  const axisIdx = n.findIndex((c) => c !== 0);
  const axis = (["X", "Y", "Z"] as const)[axisIdx] as Axis;
  const layer = (n[axisIdx]! > 0 ? 1 : -1) as Layer;
  return { type: "turn", axis, layer, dir };
}

/** Corner position of cubio id in the standard assembly (id bits = x,y,z signs). */
export function homeCorner(id: number): Vec3 {
  if (!Number.isInteger(id) || id < 0 || id > 7) throw new Error(`bad cubio id ${id}`);
  return [id & 4 ? 1 : -1, id & 2 ? 1 : -1, id & 1 ? 1 : -1];
}

export const ROT_IDENTITY: [Vec3, Vec3, Vec3] = [
  [1, 0, 0],
  [0, 1, 0],
  [0, 0, 1],
];

/**
 * CSS matrix3d placing a face plane of side `sidePx` on the cube:
 * local +x maps to the face's u, local +y to v, and the plane sits at
 * normal * side/2.  World y points up but screen y points down, so the
 * whole scene is handed to CSS through worldToScreen (y negated); the
 * per-face content stays unmirrored because every basis vector gets
 * the same treatment.
 */
export function faceTransform(face: FaceName, sidePx: number): string {
  const [u, v] = FACE_FRAME[face];
  const n = FACE_NORMAL[face];
  const s = (w: Vec3): Vec3 => [w[0], -w[1], w[2]];
  const su = s(u);
  const sv = s(v);
  const sn = s(n);
  const half = sidePx / 2;
  const m = [
    su[0], su[1], su[2], 0,
    sv[0], sv[1], sv[2], 0,
    sn[0], sn[1], sn[2], 0,
    sn[0] * half, sn[1] * half, sn[2] * half, 1,
  ];
  return `matrix3d(${m.join(",")})`;
}

/** 3D position of a facet's center pixel area corner, for layout checks. */
export function facetCenter(a: FacetAddr, sidePx: number): Vec3 {
  const [u, v] = FACE_FRAME[a.face];
  const n = FACE_NORMAL[a.face];
  const half = sidePx / 2;
  const du = (a.col === 0 ? -0.5 : 0.5) * half;
  const dv = (a.row === 0 ? -0.5 : 0.5) * half;
  return [
    n[0] * half + u[0] * du + v[0] * dv,
    n[1] * half + u[1] * du + v[1] * dv,
    n[2] * half + u[2] * du + v[2] * dv,
  ];
}
