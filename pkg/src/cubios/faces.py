"""Global faces of the assembled cube and the 24-facet address space.

Fundamental facts, everything else in the package is derived from them:

 * The assembly occupies the eight corners (+-1, +-1, +-1) of a lattice,
   so the assembled cube has 6 global faces and each face is a 2x2 grid
   of cubio displays ("facets"): 24 facets total.

 * Every face carries a fixed 2D frame (u to the right, v downward when
   looking at that face from outside).  The frame choice below is the one
   convention in the package; all cross-edge behaviour is computed from
   it, never tabulated by hand.

 * A facet is addressed as (face, row, col) with row = v div half,
   col = u div half.  Facet index = face*4 + row*2 + col, giving a stable
   0..23 ordering (U, D, F, B, R, L; row-major inside a face).

 * Each facet is one outward display of one corner position: the pair
   (corner, outward normal) identifies it.  That correspondence is the
   bridge between 3D turns and 2D surface content.
"""

from __future__ import annotations

import enum
from typing import NamedTuple

Vec = tuple[int, int, int]


class GlobalFace(enum.IntEnum):
    U = 0
    D = 1
    F = 2
    B = 3
    R = 4
    L = 5


# Outward unit normal of each face.
FACE_NORMAL: dict[GlobalFace, Vec] = {
    GlobalFace.U: (0, 1, 0),
    GlobalFace.D: (0, -1, 0),
    GlobalFace.F: (0, 0, 1),
    GlobalFace.B: (0, 0, -1),
    GlobalFace.R: (1, 0, 0),
    GlobalFace.L: (-1, 0, 0),
}

# (u, v) basis of each face: u runs rightward, v runs downward, viewed
# from outside the cube.  For every face u x v points INTO the cube, so
# all six frames share one chirality (checked in tests).
FACE_FRAME: dict[GlobalFace, tuple[Vec, Vec]] = {
    GlobalFace.U: ((1, 0, 0), (0, 0, 1)),
    GlobalFace.D: ((1, 0, 0), (0, 0, -1)),
    GlobalFace.F: ((1, 0, 0), (0, -1, 0)),
    GlobalFace.B: ((-1, 0, 0), (0, -1, 0)),
    GlobalFace.R: ((0, 0, -1), (0, -1, 0)),
    GlobalFace.L: ((0, 0, 1), (0, -1, 0)),
}

_NORMAL_TO_FACE: dict[Vec, GlobalFace] = {n: f for f, n in FACE_NORMAL.items()}


def face_of_normal(n: Vec) -> GlobalFace:
    return _NORMAL_TO_FACE[n]


class FacetAddress(NamedTuple):
    face: GlobalFace
    row: int
    col: int


N_FACETS = 24


def facet_index(f: FacetAddress) -> int:
    return int(f.face) * 4 + f.row * 2 + f.col


def facet_of_index(i: int) -> FacetAddress:
    face, rest = divmod(i, 4)
    row, col = divmod(rest, 2)
    return FacetAddress(GlobalFace(face), row, col)


ALL_FACETS: tuple[FacetAddress, ...] = tuple(facet_of_index(i) for i in range(N_FACETS))


def _add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _scale(a: Vec, k: int) -> Vec:
    return (a[0] * k, a[1] * k, a[2] * k)


def facet_sticker(f: FacetAddress) -> tuple[Vec, Vec]:
    """(corner position, outward normal) of the cubio display behind a facet.

    col selects the sign along u, row the sign along v; the normal axis
    contributes the remaining +-1 component.
    """
    n = FACE_NORMAL[f.face]
    u, v = FACE_FRAME[f.face]
    corner = _add(n, _add(_scale(u, 2 * f.col - 1), _scale(v, 2 * f.row - 1)))
    return corner, n


_STICKER_TO_FACET: dict[tuple[Vec, Vec], FacetAddress] = {
    facet_sticker(f): f for f in ALL_FACETS
}


def facet_of_sticker(corner: Vec, normal: Vec) -> FacetAddress:
    return _STICKER_TO_FACET[(corner, normal)]


ALL_CORNERS: tuple[Vec, ...] = tuple(
    (x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)
)
