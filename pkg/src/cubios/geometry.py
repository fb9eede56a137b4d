"""Assembly mechanics: poses, quarter turns, facet permutation, enumeration.

Fundamental facts this module rests on:

 * Cubios sit at the eight corner positions (+-1, +-1, +-1).  A pose is
   (position, orientation); orientations are the 24 proper rotations of
   the cube, kept as 3x3 integer matrices (rows), det +1.

 * A face turn rotates the four cubios of one layer a quarter turn about
   one axis.  CW is what a viewer sees looking at the turned layer's own
   face from outside: for layer +1 that is the view from the positive end
   of the axis, for layer -1 from the negative end.  Hence CW on layer +1
   is a -90 degree right-hand rotation about the positive axis, and CW on
   layer -1 is +90 degrees.

 * Turning needs a core (steel ball or pocket-cube center) to hold the
   corners together; an uncored assembly is rigid.

 * Every turn induces a permutation of the 24 facet addresses: the twelve
   stickers of the turned layer move (four on the turned face, eight on
   the side faces in two 4-cycles), twelve stay.

Everything below (rotation tables, permutations, the state count) is
derived from these facts at import or on demand, not tabulated by hand.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .faces import (
    ALL_CORNERS,
    ALL_FACETS,
    N_FACETS,
    FacetAddress,
    Vec,
    facet_of_index,
    facet_of_sticker,
    facet_sticker,
)

CubioId = int

# ===== rotations ============================================================

Rot = tuple[Vec, Vec, Vec]  # row-major 3x3, entries in {-1, 0, 1}

ROT_IDENTITY: Rot = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def rot_apply(r: Rot, v: Vec) -> Vec:
    return (
        r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
        r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
        r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
    )


def rot_mul(a: Rot, b: Rot) -> Rot:
    """a composed after b: (a*b) v == a (b v)."""
    cols = tuple(zip(*b))
    return tuple(
        tuple(sum(ra[k] * cb[k] for k in range(3)) for cb in cols) for ra in a
    )  # type: ignore[return-value]


def rot_inv(r: Rot) -> Rot:
    return tuple(zip(*r))  # type: ignore[return-value]


def _quarter(axis: int, sign: int) -> Rot:
    """Right-hand rotation by sign*90 degrees about the positive axis."""
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    m = [[0] * 3 for _ in range(3)]
    m[axis][axis] = 1
    m[i][i] = 0
    m[j][j] = 0
    m[i][j] = -sign
    m[j][i] = sign
    return tuple(tuple(row) for row in m)  # type: ignore[return-value]


def _all_rotations() -> tuple[Rot, ...]:
    gens = [_quarter(a, 1) for a in range(3)]
    seen = {ROT_IDENTITY}
    frontier = [ROT_IDENTITY]
    while frontier:
        nxt = []
        for r in frontier:
            for g in gens:
                c = rot_mul(g, r)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return tuple(sorted(seen))


ROTATIONS: tuple[Rot, ...] = _all_rotations()
_ROTATION_SET = frozenset(ROTATIONS)
assert len(ROTATIONS) == 24


# ===== turns ================================================================


class Axis(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2


class Spin(enum.Enum):
    CW = "cw"
    CCW = "ccw"


@dataclass(frozen=True)
class FaceTurn:
    axis: Axis
    layer: int  # -1 or +1
    spin: Spin

    def __post_init__(self) -> None:
        if self.layer not in (-1, 1):
            raise ValueError(f"layer must be -1 or +1, got {self.layer}")

    def inverse(self) -> "FaceTurn":
        return FaceTurn(
            self.axis, self.layer, Spin.CCW if self.spin is Spin.CW else Spin.CW
        )


ALL_TURNS: tuple[FaceTurn, ...] = tuple(
    FaceTurn(axis, layer, spin)
    for axis in Axis
    for layer in (-1, 1)
    for spin in (Spin.CW, Spin.CCW)
)


def turn_rotation(t: FaceTurn) -> Rot:
    # CW seen from the layer's own face: -90 about +axis when layer is +1,
    # mirrored when the viewer stands at the negative end.
    sign = -t.layer if t.spin is Spin.CW else t.layer
    return _quarter(t.axis, sign)


# ===== assembly =============================================================


class CoreKind(enum.Enum):
    NONE = "none"
    STEEL_BALL = "steel_ball"
    CUBE_CENTER = "cube_center"


class CubioPose(NamedTuple):
    pos: Vec
    rot: Rot


class CoreMissing(Exception):
    pass


@dataclass(frozen=True)
class Assembly:
    """Immutable snapshot of which cubio sits where, in what orientation."""

    cubios: Mapping[CubioId, CubioPose]
    core: CoreKind

    def __post_init__(self) -> None:
        seen: set[Vec] = set()
        if len(self.cubios) > 8:
            raise ValueError("at most 8 cubios fit the lattice")
        for cid, pose in self.cubios.items():
            if pose.pos not in ALL_CORNERS:
                raise ValueError(f"cubio {cid} off-lattice at {pose.pos}")
            if pose.pos in seen:
                raise ValueError(f"two cubios at {pose.pos}")
            if pose.rot not in _ROTATION_SET:
                raise ValueError(f"cubio {cid} has a non-rotation orientation")
            seen.add(pose.pos)

    def occupant(self, pos: Vec) -> CubioId | None:
        for cid, pose in self.cubios.items():
            if pose.pos == pos:
                return cid
        return None

    def present_facets(self) -> tuple[FacetAddress, ...]:
        occupied = {pose.pos for pose in self.cubios.values()}
        return tuple(f for f in ALL_FACETS if facet_sticker(f)[0] in occupied)


def new_standard_assembly(core: CoreKind = CoreKind.STEEL_BALL) -> Assembly:
    """Eight cubios, ids 0..7, each at its corner in identity orientation.

    Ids follow the corner order (-1,-1,-1), (-1,-1,+1), ... (+1,+1,+1).
    """
    return Assembly(
        cubios={i: CubioPose(ALL_CORNERS[i], ROT_IDENTITY) for i in range(8)},
        core=core,
    )


def add_cubio(a: Assembly, cid: CubioId, pos: Vec, rot: Rot = ROT_IDENTITY) -> Assembly:
    if cid in a.cubios:
        raise ValueError(f"cubio id {cid} already present")
    cubios = dict(a.cubios)
    cubios[cid] = CubioPose(pos, rot)
    return Assembly(cubios=cubios, core=a.core)


def remove_cubio(a: Assembly, cid: CubioId) -> Assembly:
    if cid not in a.cubios:
        raise KeyError(f"no cubio {cid} in assembly")
    cubios = dict(a.cubios)
    del cubios[cid]
    return Assembly(cubios=cubios, core=a.core)


def apply_turn(a: Assembly, t: FaceTurn) -> Assembly:
    if a.core is CoreKind.NONE:
        raise CoreMissing("turning requires a core")
    r = turn_rotation(t)
    cubios = {}
    for cid, pose in a.cubios.items():
        if pose.pos[t.axis] == t.layer:
            cubios[cid] = CubioPose(rot_apply(r, pose.pos), rot_mul(r, pose.rot))
        else:
            cubios[cid] = pose
    return Assembly(cubios=cubios, core=a.core)


def contacts(a: Assembly) -> tuple[tuple[CubioId, CubioId, Vec], ...]:
    """Touching cubio pairs as (id_a, id_b, direction a->b), id_a < id_b."""
    by_pos = {pose.pos: cid for cid, pose in a.cubios.items()}
    out = []
    for cid in sorted(a.cubios):
        p = a.cubios[cid].pos
        for axis in range(3):
            if p[axis] != -1:
                continue
            q = tuple(p[k] + (2 if k == axis else 0) for k in range(3))
            other = by_pos.get(q)  # type: ignore[arg-type]
            if other is None:
                continue
            lo, hi = sorted((cid, other))
            d = tuple(
                (1 if k == axis else 0) * (1 if lo == cid else -1) for k in range(3)
            )
            out.append((lo, hi, d))
    return tuple(sorted(out))  # type: ignore[return-value]


def display_dirs(pose: CubioPose) -> tuple[Vec, Vec, Vec]:
    """Local directions of the three displays, given the current pose.

    A corner-mounted cubio always shows its displays outward, so they are
    the current position's sign axes pulled back through the orientation.
    """
    inv = rot_inv(pose.rot)
    return tuple(
        rot_apply(inv, tuple((pose.pos[k] if k == axis else 0) for k in range(3)))
        for axis in range(3)
    )  # type: ignore[return-value]


# ===== facet permutation ====================================================

Perm24 = tuple[int, ...]

PERM_IDENTITY: Perm24 = tuple(range(N_FACETS))

_STICKERS: tuple[tuple[Vec, Vec], ...] = tuple(facet_sticker(f) for f in ALL_FACETS)


def facet_permutation(t: FaceTurn) -> Perm24:
    """Where each facet's content travels: result[i] = j means facet i's
    sticker occupies facet j after the turn."""
    r = turn_rotation(t)
    perm = []
    for corner, normal in _STICKERS:
        if corner[t.axis] == t.layer:
            moved = facet_of_sticker(rot_apply(r, corner), rot_apply(r, normal))
            perm.append(moved.face * 4 + moved.row * 2 + moved.col)
        else:
            perm.append(len(perm))
    return tuple(perm)


def perm_compose(first: Perm24, then: Perm24) -> Perm24:
    return tuple(then[first[i]] for i in range(N_FACETS))


def perm_invert(p: Perm24) -> Perm24:
    inv = [0] * N_FACETS
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def transport_labeling(labeling: Mapping[FacetAddress, object], p: Perm24) -> dict:
    """Move facet contents along p; facets absent from the labeling stay absent."""
    out = {}
    for f, label in labeling.items():
        j = p[f.face * 4 + f.row * 2 + f.col]
        out[facet_of_index(j)] = label
    return out


def is_solved(labeling: Mapping[FacetAddress, object]) -> bool:
    """True when every global face shows a single label across its present
    facets (vacuously true for faces with no facet in the labeling)."""
    per_face: dict[int, set] = {}
    for f, label in labeling.items():
        per_face.setdefault(int(f.face), set()).add(label)
    return all(len(labels) == 1 for labels in per_face.values())


# ===== scrambling ===========================================================


def scramble(seed: int, n: int, core: CoreKind = CoreKind.STEEL_BALL):
    """n seeded random quarter turns from the standard assembly."""
    rng = random.Random(seed)
    a = new_standard_assembly(core)
    turns = []
    for _ in range(n):
        t = rng.choice(ALL_TURNS)
        turns.append(t)
        a = apply_turn(a, t)
    return a, tuple(turns)


# ===== state enumeration ====================================================
#
# States are counted with the (-1,-1,-1) cubio pinned (quotients out whole
# body rotation), so only the three +1 layers may move.  One enumeration
# step is a grip of a free layer twisted 90, 180 or 270 degrees: 9
# successor moves per state.  The closed form is 7! * 3^6 = 3,674,160.
#
# For speed the BFS runs on packed 35-bit states (7 slots x 5 bits), with
# per-move slot permutations and twist deltas derived from apply_turn on a
# probe assembly, never written down by hand.  Twist is the index of a
# cubio's reference sticker (the one facing +-Y at home) among the current
# corner's outward directions ordered by the +120 degree rotation about
# that corner's diagonal; with that convention the delta per slot is
# independent of which cubio sits there.

_PINNED: Vec = (-1, -1, -1)
_SLOTS: tuple[Vec, ...] = tuple(c for c in ALL_CORNERS if c != _PINNED)
_SLOT_INDEX = {c: i for i, c in enumerate(_SLOTS)}


def _corner_cycle(q: Vec) -> Rot:
    """+120 degree rotation about the diagonal through corner q."""
    x, y, z = q
    half = (
        (0, x * y - z, y + x * z),
        (z + x * y, 0, y * z - x),
        (x * z - y, x + y * z, 0),
    )
    return tuple(tuple(e // 2 for e in row) for row in half)  # type: ignore[return-value]


def _ref_dir(q: Vec) -> Vec:
    return (0, q[1], 0)


def _twist_of(home: Vec, rot: Rot) -> int:
    q = rot_apply(rot, home)
    d = rot_apply(rot, _ref_dir(home))
    c = _corner_cycle(q)
    order = [_ref_dir(q)]
    order.append(rot_apply(c, order[0]))
    order.append(rot_apply(c, order[1]))
    return order.index(d)


class EnumerationResult(NamedTuple):
    count: int
    depth_counts: tuple[int, ...]


def _grip_moves() -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """(slot permutation, twist delta per slot) for each of the 9 grips."""
    moves = []
    for axis in Axis:
        turn = FaceTurn(axis, 1, Spin.CW)
        for reps in (1, 2, 3):
            a = new_standard_assembly()
            ids_at = {pose.pos: cid for cid, pose in a.cubios.items()}
            for _ in range(reps):
                a = apply_turn(a, turn)
            sigma = list(range(7))
            delta = [0] * 7
            for pos, cid in ids_at.items():
                if pos == _PINNED:
                    continue
                s = _SLOT_INDEX[pos]
                pose = a.cubios[cid]
                sigma[s] = _SLOT_INDEX[pose.pos]
                delta[s] = _twist_of(pos, pose.rot)
            moves.append((tuple(sigma), tuple(delta)))
    return moves


def encode_state(a: Assembly) -> int:
    """Pack a full 8-cubio assembly (standard ids, pinned corner home and
    untwisted) into the 35-bit BFS state."""
    pinned = a.cubios[0]
    if pinned.pos != _PINNED or pinned.rot != ROT_IDENTITY:
        raise ValueError("state encoding expects the pinned cubio at home")
    packed = 0
    for cid in range(1, 8):
        pose = a.cubios[cid]
        home = ALL_CORNERS[cid]
        s = _SLOT_INDEX[pose.pos]
        val = (cid - 1) * 3 + _twist_of(home, pose.rot)
        packed |= val << (5 * s)
    return packed


_SOLVED_PACKED = sum(((i * 3) << (5 * i)) for i in range(7))


def _apply_move(packed: np.ndarray, sigma, delta) -> np.ndarray:
    out = np.zeros_like(packed)
    for s in range(7):
        val = (packed >> np.uint64(5 * s)) & np.uint64(31)
        occ = val // np.uint64(3)
        tw = (val % np.uint64(3) + np.uint64(delta[s])) % np.uint64(3)
        out |= (occ * np.uint64(3) + tw) << np.uint64(5 * sigma[s])
    return out


def enumerate_states(limit: int | None = None) -> EnumerationResult:
    """Breadth-first count of distinct assembly states (pinned-corner
    quotient), optionally stopping after `limit` grip depths."""
    moves = _grip_moves()
    visited = np.array([_SOLVED_PACKED], dtype=np.uint64)
    frontier = visited.copy()
    depth_counts = [1]
    depth = 0
    while frontier.size and (limit is None or depth < limit):
        succ = np.concatenate([_apply_move(frontier, s, d) for s, d in moves])
        succ = np.unique(succ)
        at = np.searchsorted(visited, succ)
        at[at == visited.size] = 0
        fresh = succ[visited[at] != succ]
        if not fresh.size:
            break
        visited = np.union1d(visited, fresh)
        frontier = fresh
        depth_counts.append(int(fresh.size))
        depth += 1
    return EnumerationResult(int(visited.size), tuple(depth_counts))
