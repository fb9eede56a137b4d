"""PacSurface: Pac-Man loose on all six faces at once.

The playfield is a 16x16 cell grid per face (8x8 per facet) joined into
one closed surface by the atlas, so corridors run across cube edges.
Tilting steers Pac-Man; ghosts advance every second tick along shortest
surface paths.  Turning sides carries the maze and everyone in it along
with the moved facets.

The maze is built once per seed: a randomized-Kruskal spanning tree over
the cell graph guarantees every cell is reachable, then 15% of the
remaining edges are kept as walls and the rest opened as loops.  Walls
are stored as per-cell half-walls (facet data), so a turn transports
them with their facets; a crossing is blocked if either side objects.
"""

from __future__ import annotations

import random
from collections import deque

from ..faces import GlobalFace, FACE_FRAME
from ..geometry import FaceTurn
from ..hashing import derive_seed
from ..surface import (
    Field,
    Heading,
    SurfaceCoord,
    cell_turn_map,
    facet_of_cell,
    heading_turn_map,
    step_grid,
)
from . import GamePhase, SurfaceGame, TiltVector

CELLS = 16  # per face edge
N_CELLS = 6 * CELLS * CELLS
DEAD_ZONE = 0.25
POWER_TICKS = 40
GHOST_COUNT = 4
DOT_POINTS = 10
PELLET_POINTS = 50
GHOST_POINTS = 200
WALL_SHARE = 15  # percent of non-tree edges kept as walls


def cell_index(c: SurfaceCoord) -> int:
    return int(c.face) * CELLS * CELLS + c.v * CELLS + c.u


def cell_of_index(i: int) -> SurfaceCoord:
    face, rest = divmod(i, CELLS * CELLS)
    v, u = divmod(rest, CELLS)
    return SurfaceCoord(GlobalFace(face), u, v)


ALL_CELLS: tuple[SurfaceCoord, ...] = tuple(cell_of_index(i) for i in range(N_CELLS))

# static geometry: for every (cell, heading) the neighbor cell and the
# heading pointing back at us from its side
_STEP: list[list[tuple[int, Heading]]] = []
for _c in ALL_CELLS:
    row = []
    for _h in Heading:
        _f, _u, _v, _nh, _ = step_grid(_c.face, _c.u, _c.v, _h, CELLS)
        row.append((cell_index(SurfaceCoord(_f, _u, _v)), _nh.reverse()))
    _STEP.append(row)


def _union_find_tree(edges: list[tuple[int, int]]) -> set[tuple[int, int]]:
    parent = list(range(N_CELLS))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = set()
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            tree.add((a, b))
    return tree


def generate_walls(seed: int) -> dict[int, int]:
    """Per-cell wall bitmasks (bit = Heading value), mirrored on both sides."""
    rng = random.Random(derive_seed(seed, "pacsurface", "maze"))
    seen = set()
    edges = []
    for i in range(N_CELLS):
        for h in Heading:
            j, _ = _STEP[i][h]
            key = (min(i, j), max(i, j))
            if key not in seen:
                seen.add(key)
                edges.append(key)
    rng.shuffle(edges)
    tree = _union_find_tree(edges)
    extras = sorted(e for e in edges if e not in tree)
    n_walls = (len(extras) * WALL_SHARE + 50) // 100
    walls: dict[int, int] = {}
    for a, b in rng.sample(extras, n_walls):
        for h in Heading:  # find the heading(s) that cross this edge
            j, back = _STEP[a][h]
            if j == b:
                walls[a] = walls.get(a, 0) | (1 << h)
                walls[b] = walls.get(b, 0) | (1 << back)
    return walls


_GHOST_COLORS = ((224, 48, 48), (240, 110, 170), (64, 210, 210), (235, 160, 52))
_FRIGHT = (60, 70, 235)
_WALL = (40, 70, 200)
_DOT = (250, 200, 150)
_PAC = (250, 220, 40)
_BG = (6, 6, 10)


class PacSurface(SurfaceGame):
    name = "pacsurface"

    def __init__(self, seed: int):
        super().__init__(seed)
        self.walls = generate_walls(seed)
        rng = random.Random(derive_seed(seed, "pacsurface", "spawn"))
        picks = rng.sample(range(N_CELLS), 1 + GHOST_COUNT)
        self.pac = picks[0]
        self.ghosts = list(picks[1:])
        self.origins = list(picks[1:])
        reserved = set(picks)
        self.pellets = set()
        for face in GlobalFace:
            base = int(face) * CELLS * CELLS
            free = [i for i in range(base, base + CELLS * CELLS) if i not in reserved]
            p = rng.choice(free)
            self.pellets.add(p)
            reserved.add(p)
        self.dots = set(range(N_CELLS)) - reserved
        self.dots_eaten = 0
        self.power = 0
        self.tilt: TiltVector | None = None
        self._adj: list[list[tuple[int, int]]] | None = None  # (neighbor, heading)

    # --- movement fabric ---------------------------------------------------

    def blocked(self, i: int, h: Heading) -> bool:
        j, back = _STEP[i][h]
        return bool(self.walls.get(i, 0) >> h & 1 or self.walls.get(j, 0) >> back & 1)

    def _adjacency(self) -> list[list[tuple[int, int]]]:
        if self._adj is None:
            self._adj = [
                [(_STEP[i][h][0], int(h)) for h in Heading if not self.blocked(i, h)]
                for i in range(N_CELLS)
            ]
        return self._adj

    def _distances_from(self, src: int) -> list[int]:
        adj = self._adjacency()
        dist = [-1] * N_CELLS
        dist[src] = 0
        q = deque([src])
        while q:
            i = q.popleft()
            for j, _ in adj[i]:
                if dist[j] < 0:
                    dist[j] = dist[i] + 1
                    q.append(j)
        return dist

    def _pac_heading(self) -> Heading | None:
        if self.tilt is None:
            return None
        c = cell_of_index(self.pac)
        ub, vb = FACE_FRAME[c.face]
        g = self.tilt
        gu = g.x * ub[0] + g.y * ub[1] + g.z * ub[2]
        gv = g.x * vb[0] + g.y * vb[1] + g.z * vb[2]
        if gu * gu + gv * gv < DEAD_ZONE * DEAD_ZONE:
            return None
        if abs(gu) >= abs(gv):
            return Heading.PU if gu > 0 else Heading.NU
        return Heading.PV if gv > 0 else Heading.NV

    # --- events --------------------------------------------------------------

    def on_tilt(self, g: TiltVector) -> None:
        self.tilt = g

    def on_tick(self) -> None:
        self.tick_count += 1
        if self._phase is not GamePhase.RUNNING:
            return
        if self.power > 0:
            self.power -= 1
        h = self._pac_heading()
        if h is not None and not self.blocked(self.pac, h):
            self.pac = _STEP[self.pac][h][0]
            if self.pac in self.dots:
                self.dots.discard(self.pac)
                self.dots_eaten += 1
                self._score += DOT_POINTS
            elif self.pac in self.pellets:
                self.pellets.discard(self.pac)
                self._score += PELLET_POINTS
                self.power = POWER_TICKS
        if self._resolve_contact():
            return
        if self.tick_count % 2 == 0:
            dist = self._distances_from(self.pac)
            adj = self._adjacency()
            for gi in range(GHOST_COUNT):
                here = self.ghosts[gi]
                options = [(dist[j], j) for j, _ in adj[here] if dist[j] >= 0]
                if options and (dist[here] < 0 or min(options)[0] < dist[here]):
                    self.ghosts[gi] = min(options)[1]
            if self._resolve_contact():
                return
        if not self.dots:
            self._phase = GamePhase.WON
            self._message = "cleared"

    def _resolve_contact(self) -> bool:
        """True if the game ended here."""
        for gi in range(GHOST_COUNT):
            if self.ghosts[gi] != self.pac:
                continue
            if self.power > 0:
                self._score += GHOST_POINTS
                self.ghosts[gi] = self.origins[gi]
            else:
                self._phase = GamePhase.LOST
                self._message = "caught"
                return True
        return False

    def on_turn(self, t: FaceTurn) -> None:
        cmap = cell_turn_map(t, CELLS)
        hmap = heading_turn_map(t)
        imap = {cell_index(a): cell_index(b) for a, b in cmap.items()}
        fmap = {
            cell_index(a): facet_of_cell(a.face, a.u, a.v, CELLS) for a in cmap
        }
        new_walls: dict[int, int] = {}
        for i, bits in self.walls.items():
            if i in imap:
                fac = fmap[i]
                nb = 0
                for h in Heading:
                    if bits >> h & 1:
                        nb |= 1 << hmap[(fac, h)]
                new_walls[imap[i]] = nb
            else:
                new_walls[i] = bits
        self.walls = new_walls
        self.dots = {imap.get(i, i) for i in self.dots}
        self.pellets = {imap.get(i, i) for i in self.pellets}
        self.pac = imap.get(self.pac, self.pac)
        self.ghosts = [imap.get(i, i) for i in self.ghosts]
        self.origins = [imap.get(i, i) for i in self.origins]
        self._adj = None

    # --- output ---------------------------------------------------------------

    def field(self) -> Field:
        fld = Field()
        fld.data[:] = _BG
        px = 256 // CELLS
        for i, bits in self.walls.items():
            c = cell_of_index(i)
            r = fld.data[int(c.face), c.v * px : (c.v + 1) * px, c.u * px : (c.u + 1) * px]
            if bits >> Heading.PU & 1:
                r[:, -2:] = _WALL
            if bits >> Heading.NU & 1:
                r[:, :2] = _WALL
            if bits >> Heading.PV & 1:
                r[-2:, :] = _WALL
            if bits >> Heading.NV & 1:
                r[:2, :] = _WALL

        def cell_rect(i: int):
            c = cell_of_index(i)
            return fld.data[
                int(c.face), c.v * px : (c.v + 1) * px, c.u * px : (c.u + 1) * px
            ]

        for i in self.dots:
            cell_rect(i)[6:10, 6:10] = _DOT
        for i in self.pellets:
            cell_rect(i)[4:12, 4:12] = (255, 255, 255)
        for gi in range(GHOST_COUNT):
            color = _FRIGHT if self.power > 0 else _GHOST_COLORS[gi]
            cell_rect(self.ghosts[gi])[2:14, 2:14] = color
        cell_rect(self.pac)[2:14, 2:14] = _PAC
        return fld

    def canonical_state(self) -> bytes:
        # logical state only; the session clock is digested separately
        return repr(
            (
                sorted(self.walls.items()),
                sorted(self.dots),
                sorted(self.pellets),
                self.pac,
                tuple(self.ghosts),
                tuple(self.origins),
                self.power,
                self.dots_eaten,
                self._score,
                self._phase.value,
            )
        ).encode()
