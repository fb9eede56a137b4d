"""The shared game surface: one pixel space wrapped around the assembly.

The six 256x256 face images form a single closed surface.  Walking off a
face edge continues on the neighbouring face; which face, entering where,
heading which way is computed from the face frames and the pixel-center
embedding s(k) = (2k + 1 - N) / N, never written out by hand.  The same
transition table serves every grid resolution (pixels, game cells,
facets) because it only encodes frame geometry.

A step crossing a cube corner point would have no neighbour; with the
four axis-aligned headings every off-edge exit crosses a full face edge,
so such a step cannot arise here.  The Blocked flag in step results is
kept for callers that must handle the contract anyway.
"""

from __future__ import annotations

import enum
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .faces import (
    ALL_FACETS,
    FACE_FRAME,
    FACE_NORMAL,
    FacetAddress,
    GlobalFace,
    Vec,
    face_of_normal,
    facet_of_index,
    facet_of_sticker,
    facet_sticker,
)
from .geometry import (
    Assembly,
    CubioId,
    CubioPose,
    FaceTurn,
    display_dirs,
    facet_permutation,
    rot_apply,
    turn_rotation,
)

FACE_PIXELS = 256  # pixels per face edge
FACET_PIXELS = 128  # pixels per facet edge


def face_frames() -> dict[GlobalFace, tuple[Vec, Vec]]:
    """The fixed (u, v) frame of every face; u right, v down from outside."""
    return dict(FACE_FRAME)


class Heading(enum.IntEnum):
    PU = 0  # +u
    NU = 1  # -u
    PV = 2  # +v
    NV = 3  # -v

    def reverse(self) -> "Heading":
        return Heading(self ^ 1)


_DELTA = {Heading.PU: (1, 0), Heading.NU: (-1, 0), Heading.PV: (0, 1), Heading.NV: (0, -1)}


def _neg(v: Vec) -> Vec:
    return (-v[0], -v[1], -v[2])


def heading_vec(face: GlobalFace, h: Heading) -> Vec:
    u, v = FACE_FRAME[face]
    return (u, _neg(u), v, _neg(v))[h]


class SurfaceCoord(NamedTuple):
    face: GlobalFace
    u: int
    v: int


class StepResult(NamedTuple):
    coord: SurfaceCoord
    heading: Heading
    blocked: bool


def embed(face: GlobalFace, u: int, v: int, size: int = FACE_PIXELS) -> tuple[float, float, float]:
    """3D center of a grid cell on a face of the [-1, 1]^3 cube."""
    n = FACE_NORMAL[face]
    ub, vb = FACE_FRAME[face]
    su = (2 * u + 1 - size) / size
    sv = (2 * v + 1 - size) / size
    return tuple(n[k] + ub[k] * su + vb[k] * sv for k in range(3))  # type: ignore[return-value]


class _EdgeHop(NamedTuple):
    face: GlobalFace
    heading: Heading
    enter_u: bool  # fixed coordinate lands on u (else v)
    enter_high: bool  # fixed coordinate is size-1 (else 0)
    flip: bool  # carried coordinate is mirrored


def _derive_edge_map() -> dict[tuple[GlobalFace, Heading], _EdgeHop]:
    out = {}
    for face in GlobalFace:
        n = FACE_NORMAL[face]
        for h in Heading:
            d = heading_vec(face, h)
            nf = face_of_normal(d)
            nu, nv = FACE_FRAME[nf]
            nh = Heading((nu, _neg(nu), nv, _neg(nv)).index(_neg(n)))
            # the carried (edge-parallel) direction on the old face
            w = heading_vec(face, Heading.PV if h in (Heading.PU, Heading.NU) else Heading.PU)
            if nu in (n, _neg(n)):
                enter_u, enter_high = True, nu == n
                flip = nv == _neg(w)
                assert nv in (w, _neg(w))
            else:
                enter_u, enter_high = False, nv == n
                flip = nu == _neg(w)
                assert nv in (n, _neg(n)) and nu in (w, _neg(w))
            out[(face, h)] = _EdgeHop(nf, nh, enter_u, enter_high, flip)
    return out


_EDGE_MAP = _derive_edge_map()


def step_grid(
    face: GlobalFace, u: int, v: int, h: Heading, size: int
) -> tuple[GlobalFace, int, int, Heading, bool]:
    """One step on the size x size per-face grid, wrapping across edges."""
    du, dv = _DELTA[h]
    u2, v2 = u + du, v + dv
    if 0 <= u2 < size and 0 <= v2 < size:
        return face, u2, v2, h, False
    hop = _EDGE_MAP[(face, h)]
    t = v if h in (Heading.PU, Heading.NU) else u
    if hop.flip:
        t = size - 1 - t
    fixed = size - 1 if hop.enter_high else 0
    if hop.enter_u:
        return hop.face, fixed, t, hop.heading, False
    return hop.face, t, fixed, hop.heading, False


def step(c: SurfaceCoord, h: Heading) -> StepResult:
    face, u, v, nh, blocked = step_grid(c.face, c.u, c.v, h, FACE_PIXELS)
    return StepResult(SurfaceCoord(face, u, v), nh, blocked)


def facet_at(c: SurfaceCoord) -> FacetAddress:
    return FacetAddress(c.face, c.v // FACET_PIXELS, c.u // FACET_PIXELS)


def facet_of_cell(face: GlobalFace, u: int, v: int, size: int) -> FacetAddress:
    """Which facet a size x size grid cell belongs to."""
    half = size // 2
    return FacetAddress(face, v // half, u // half)


# ===== turn transport =======================================================


def cell_turn_map(t: FaceTurn, size: int) -> dict[SurfaceCoord, SurfaceCoord]:
    """Destination of every grid cell on the turned layer's facets.

    Works at any even resolution because it rides the scaled embedding:
    size*p has integer components, so the rotated cell lands exactly on a
    cell center of the destination face.  Cells off the layer are absent.
    """
    r = turn_rotation(t)
    out: dict[SurfaceCoord, SurfaceCoord] = {}
    half = size // 2
    for f in ALL_FACETS:
        corner, _ = facet_sticker(f)
        if corner[t.axis] != t.layer:
            continue
        n = FACE_NORMAL[f.face]
        ub, vb = FACE_FRAME[f.face]
        for v in range(f.row * half, f.row * half + half):
            sv = 2 * v + 1 - size
            for u in range(f.col * half, f.col * half + half):
                su = 2 * u + 1 - size
                q = rot_apply(
                    r,
                    tuple(size * n[k] + ub[k] * su + vb[k] * sv for k in range(3)),
                )
                # only the normal axis reaches +-size; in-plane stays odd, smaller
                nf = face_of_normal(
                    tuple(1 if x == size else -1 if x == -size else 0 for x in q)
                )
                nu, nv = FACE_FRAME[nf]
                u2 = (sum(q[k] * nu[k] for k in range(3)) + size - 1) // 2
                v2 = (sum(q[k] * nv[k] for k in range(3)) + size - 1) // 2
                out[SurfaceCoord(f.face, u, v)] = SurfaceCoord(nf, u2, v2)
    return out


def heading_turn_map(t: FaceTurn) -> dict[tuple[FacetAddress, Heading], Heading]:
    """What each face-frame heading on a turned facet becomes after the turn."""
    r = turn_rotation(t)
    perm = facet_permutation(t)
    out: dict[tuple[FacetAddress, Heading], Heading] = {}
    for i, f in enumerate(ALL_FACETS):
        corner, _ = facet_sticker(f)
        if corner[t.axis] != t.layer:
            continue
        nf = facet_of_index(perm[i]).face
        nu, nv = FACE_FRAME[nf]
        axes = (nu, _neg(nu), nv, _neg(nv))
        for h in Heading:
            out[(f, h)] = Heading(axes.index(rot_apply(r, heading_vec(f.face, h))))
    return out


# ===== facet rings ==========================================================


def _ring(axis: int, sign: int) -> tuple[FacetAddress, ...]:
    members = [
        f
        for f in ALL_FACETS
        if FACE_NORMAL[f.face][axis] == 0 and facet_sticker(f)[0][axis] == sign
    ]
    start = min(members)
    # walk along the band: the in-plane direction orthogonal to the ring axis
    walk = None
    for h in Heading:
        d = heading_vec(start.face, h)
        if d[axis] == 0 and sum(d) > 0:
            walk = h
            break
    assert walk is not None
    ring = []
    face, u, v, h = start.face, start.col, start.row, walk
    for _ in range(8):
        ring.append(FacetAddress(face, v, u))
        face, u, v, h, _ = step_grid(face, u, v, h, 2)
    assert set(ring) == set(members)
    return tuple(ring)


def facet_rings() -> tuple[tuple[FacetAddress, ...], ...]:
    """The six closed bands of 8 facets, one per (axis, side) pair."""
    return _RINGS


_RINGS = tuple(_ring(axis, sign) for axis in range(3) for sign in (-1, 1))


# ===== the pixel field ======================================================

RGB = tuple[int, int, int]


class Field:
    """Dense RGB content for the whole surface, indexed by SurfaceCoord.

    Backed by one (6, 256, 256, 3) uint8 array in [face, v, u] order so
    games can paint with numpy slices.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray | None = None):
        if data is None:
            data = np.zeros((6, FACE_PIXELS, FACE_PIXELS, 3), dtype=np.uint8)
        if data.shape != (6, FACE_PIXELS, FACE_PIXELS, 3) or data.dtype != np.uint8:
            raise ValueError("field must be (6, 256, 256, 3) uint8")
        self.data = data

    def __getitem__(self, c: SurfaceCoord) -> RGB:
        px = self.data[int(c.face), c.v, c.u]
        return (int(px[0]), int(px[1]), int(px[2]))

    def __setitem__(self, c: SurfaceCoord, rgb: RGB) -> None:
        self.data[int(c.face), c.v, c.u] = rgb

    def face_image(self, face: GlobalFace) -> np.ndarray:
        return self.data[int(face)]

    def fill_face(self, face: GlobalFace, rgb: RGB) -> None:
        self.data[int(face)] = rgb

    def fill_facet(self, f: FacetAddress, rgb: RGB) -> None:
        r0, c0 = f.row * FACET_PIXELS, f.col * FACET_PIXELS
        self.data[int(f.face), r0 : r0 + FACET_PIXELS, c0 : c0 + FACET_PIXELS] = rgb

    def facet_rect(self, f: FacetAddress) -> np.ndarray:
        r0, c0 = f.row * FACET_PIXELS, f.col * FACET_PIXELS
        return self.data[int(f.face), r0 : r0 + FACET_PIXELS, c0 : c0 + FACET_PIXELS]

    def copy(self) -> "Field":
        return Field(self.data.copy())


class MissingFacet(Exception):
    pass


def facet_owner(a: Assembly, f: FacetAddress) -> CubioId:
    corner, _ = facet_sticker(f)
    cid = a.occupant(corner)
    if cid is None:
        raise MissingFacet(f"no cubio behind facet {f}")
    return cid


# ===== rendering to per-display buffers =====================================

# local face index convention, shared with the mesh module:
LOCAL_DIRS: tuple[Vec, ...] = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)

FacetBuffer = np.ndarray  # (128, 128, 3) uint8

# in-plane rotation count for np.rot90, keyed by the display's global
# (x-dir, y-dir) expressed relative to the face frame (u, v)
_ROT90_OF = {
    ("+u", "+v"): 0,
    ("+v", "-u"): 1,
    ("-u", "-v"): 2,
    ("-v", "+u"): 3,
}


def _rel(d: Vec, u: Vec, v: Vec) -> str:
    if d == u:
        return "+u"
    if d == _neg(u):
        return "-u"
    if d == v:
        return "+v"
    if d == _neg(v):
        return "-v"
    raise AssertionError(f"direction {d} not in face plane")


def render(field: Field, a: Assembly) -> dict[tuple[CubioId, int], FacetBuffer]:
    """Content for every present display, in each display's own pixel frame.

    Keys are (cubio id, local face index).  Unoccupied facet positions
    simply have no buffer.  Each display receives exactly its facet's
    128x128 window of the field, rotated so a viewer outside the cube
    sees the field upright.
    """
    out: dict[tuple[CubioId, int], FacetBuffer] = {}
    for cid in sorted(a.cubios):
        pose = a.cubios[cid]
        for m in display_dirs(pose):
            n = rot_apply(pose.rot, m)
            facet = facet_of_sticker(pose.pos, n)
            gu, gv = FACE_FRAME[facet.face]
            lu, lv = FACE_FRAME[face_of_normal(m)]
            k = _ROT90_OF[(_rel(rot_apply(pose.rot, lu), gu, gv), _rel(rot_apply(pose.rot, lv), gu, gv))]
            sub = field.facet_rect(facet)
            out[(cid, LOCAL_DIRS.index(m))] = np.ascontiguousarray(np.rot90(sub, k))
    return out


# ===== cube-net dump ========================================================

NET_W, NET_H = 1024, 768

# (row block, col block) of each face in the cross layout: U above F,
# D below F, and the L F R B strip in the middle.
_NET_SLOT = {
    GlobalFace.U: (0, 1),
    GlobalFace.L: (1, 0),
    GlobalFace.F: (1, 1),
    GlobalFace.R: (1, 2),
    GlobalFace.B: (1, 3),
    GlobalFace.D: (2, 1),
}


def render_net(field: Field) -> bytes:
    """Binary PPM (P6) of the whole surface as an unfolded cross."""
    canvas = np.zeros((NET_H, NET_W, 3), dtype=np.uint8)
    for face, (br, bc) in _NET_SLOT.items():
        r0, c0 = br * FACE_PIXELS, bc * FACE_PIXELS
        canvas[r0 : r0 + FACE_PIXELS, c0 : c0 + FACE_PIXELS] = field.face_image(face)
    header = f"P6\n{NET_W} {NET_H}\n255\n".encode("ascii")
    return header + canvas.tobytes()
