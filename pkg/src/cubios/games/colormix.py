"""ColorMix: paint mixing driven by turns.

Each face starts in its own solid color.  A turn carries facet colors to
their new facets, then every face the turn touched pulls each of its
facets a quarter of the way toward the face average.  Colors live in
float64 so the blend is exact and the per-channel global sum is
conserved: the permutation only rearranges terms and the blend
redistributes within a face.
"""

from __future__ import annotations

import numpy as np

from ..faces import ALL_FACETS, GlobalFace, facet_of_index
from ..geometry import FaceTurn, facet_permutation
from ..surface import Field
from . import SurfaceGame

ALPHA = 0.25

FACE_COLORS: dict[GlobalFace, tuple[int, int, int]] = {
    GlobalFace.U: (255, 255, 255),
    GlobalFace.D: (255, 213, 0),
    GlobalFace.F: (0, 158, 96),
    GlobalFace.B: (0, 70, 173),
    GlobalFace.R: (196, 30, 58),
    GlobalFace.L: (255, 88, 0),
}


class ColorMix(SurfaceGame):
    name = "colormix"

    def __init__(self, seed: int):
        super().__init__(seed)
        self.colors = np.zeros((24, 3), dtype=np.float64)
        for i, f in enumerate(ALL_FACETS):
            self.colors[i] = FACE_COLORS[f.face]
        self.turns = 0

    def on_turn(self, t: FaceTurn) -> None:
        perm = np.array(facet_permutation(t))
        moved = perm != np.arange(24)
        out = self.colors.copy()
        out[perm] = self.colors
        touched = sorted({facet_of_index(int(i)).face for i in np.nonzero(moved)[0]})
        for face in touched:
            block = out[int(face) * 4 : int(face) * 4 + 4]
            block[:] = (1.0 - ALPHA) * block + ALPHA * block.mean(axis=0)
        self.colors = out
        self.turns += 1

    def field(self) -> Field:
        fld = Field()
        rgb = np.clip(np.rint(self.colors), 0, 255).astype(np.uint8)
        for i, f in enumerate(ALL_FACETS):
            fld.fill_facet(f, tuple(int(x) for x in rgb[i]))
        return fld

    def canonical_state(self) -> bytes:
        return (
            repr((self.turns, self._score, self._phase.value)).encode()
            + self.colors.tobytes()
        )
