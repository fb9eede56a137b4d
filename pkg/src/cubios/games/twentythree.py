"""TwentyThree: the 15-puzzle grown onto the cube surface.

23 numbered tiles plus one blank live on the 24 facets.  Turns carry
tiles around like any other facet content; a slide moves the tile on a
facet edge-adjacent to the blank into the blank.  Adjacency follows the
surface atlas, so tiles slide across cube edges as readily as within a
face.  Solved = tiles 1..23 in reading order over faces U, F, R, B, L, D
with the blank at the end.
"""

from __future__ import annotations

import random

from ..faces import ALL_FACETS, FacetAddress, GlobalFace, facet_index
from ..geometry import ALL_TURNS, FaceTurn, facet_permutation, transport_labeling
from ..hashing import derive_seed
from ..surface import Field, Heading, step_grid
from . import GamePhase, SurfaceGame
from .font import blit_center

BLANK = 0

GOAL_FACE_ORDER = (
    GlobalFace.U,
    GlobalFace.F,
    GlobalFace.R,
    GlobalFace.B,
    GlobalFace.L,
    GlobalFace.D,
)

Labeling = dict[FacetAddress, int]
Move = tuple  # ("turn", FaceTurn) | ("slide", FacetAddress)


class NotAdjacent(Exception):
    pass


def goal_labeling() -> Labeling:
    order = [
        FacetAddress(face, row, col)
        for face in GOAL_FACE_ORDER
        for row in (0, 1)
        for col in (0, 1)
    ]
    out = {f: i + 1 for i, f in enumerate(order[:-1])}
    out[order[-1]] = BLANK
    return out


def facet_neighbors(f: FacetAddress) -> tuple[FacetAddress, ...]:
    """The 4 facets sharing a pixel edge with f (cube edges included)."""
    out = set()
    for h in Heading:
        face, u, v, _, _ = step_grid(f.face, f.col, f.row, h, 2)
        out.add(FacetAddress(face, v, u))
    return tuple(sorted(out))


def blank_facet(l: Labeling) -> FacetAddress:
    for f, lab in l.items():
        if lab == BLANK:
            return f
    raise ValueError("labeling has no blank")


def slide(l: Labeling, frm: FacetAddress) -> Labeling:
    blank = blank_facet(l)
    if frm not in facet_neighbors(blank):
        raise NotAdjacent(f"{frm} does not touch the blank at {blank}")
    out = dict(l)
    out[blank], out[frm] = out[frm], BLANK
    return out


def is_goal(l: Labeling) -> bool:
    return l == goal_labeling()


def scramble_moves(seed: int, n: int) -> tuple[Move, ...]:
    """n random legal moves from the goal position, half turns half slides."""
    rng = random.Random(derive_seed(seed, "twentythree", "scramble"))
    l = goal_labeling()
    moves: list[Move] = []
    for _ in range(n):
        if rng.randrange(2) == 0:
            t = rng.choice(ALL_TURNS)
            l = transport_labeling(l, facet_permutation(t))
            moves.append(("turn", t))
        else:
            frm = rng.choice(facet_neighbors(blank_facet(l)))
            l = slide(l, frm)
            moves.append(("slide", frm))
    return tuple(moves)


def apply_move(l: Labeling, m: Move) -> Labeling:
    if m[0] == "turn":
        return transport_labeling(l, facet_permutation(m[1]))
    return slide(l, m[1])


def inverse_moves(moves: tuple[Move, ...]) -> tuple[Move, ...]:
    """The undo script: replayed after moves, it restores the goal."""
    l = goal_labeling()
    inv: list[Move] = []
    for m in moves:
        if m[0] == "turn":
            inv.append(("turn", m[1].inverse()))
        else:
            inv.append(("slide", blank_facet(l)))  # the slid tile's new home
        l = apply_move(l, m)
    return tuple(reversed(inv))


_TILE_BG = (52, 61, 92)
_PLACED_BG = (38, 110, 66)
_BLANK_BG = (14, 14, 18)
_INK = (240, 240, 245)


class TwentyThree(SurfaceGame):
    name = "twentythree"

    def __init__(self, seed: int, scramble_len: int = 100):
        super().__init__(seed)
        self.scramble = scramble_moves(seed, scramble_len)
        self.labeling = goal_labeling()
        for m in self.scramble:
            self.labeling = apply_move(self.labeling, m)
        self._goal = goal_labeling()
        # score counts placement progress relative to the scrambled start
        self._baseline = self._placed()
        self._refresh(initial=True)

    def on_turn(self, t: FaceTurn) -> None:
        self.labeling = transport_labeling(self.labeling, facet_permutation(t))
        self._refresh()

    def on_slide(self, frm: FacetAddress) -> None:
        self.labeling = slide(self.labeling, frm)
        self._refresh()

    def _placed(self) -> int:
        return sum(
            1 for f, lab in self.labeling.items() if lab != BLANK and self._goal[f] == lab
        )

    def _refresh(self, initial: bool = False) -> None:
        self._score = self._placed() - self._baseline
        if not initial and self._phase is GamePhase.RUNNING and is_goal(self.labeling):
            self._phase = GamePhase.WON
            self._message = "solved"

    def field(self) -> Field:
        fld = Field()
        for f in ALL_FACETS:
            lab = self.labeling[f]
            rect = fld.facet_rect(f)
            if lab == BLANK:
                rect[:] = _BLANK_BG
                continue
            rect[:] = _PLACED_BG if self._goal[f] == lab else _TILE_BG
            rect[:3, :] = rect[-3:, :] = rect[:, :3] = rect[:, -3:] = (20, 22, 30)
            blit_center(rect, str(lab), 10, _INK)
        return fld

    def canonical_state(self) -> bytes:
        items = sorted((facet_index(f), lab) for f, lab in self.labeling.items())
        return repr((items, self._score, self._phase.value)).encode()
