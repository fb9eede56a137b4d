"""Game runtimes sharing the 24-facet surface.

Every game is a deterministic value machine: construct it from a seed,
feed it events (turns, slides, tilts, ticks, structure changes), read
back a full pixel field and a status.  Identical seed + event sequence
gives identical pixels and status on every platform; nothing here reads
a clock or unkeyed randomness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Protocol, runtime_checkable

from ..faces import FacetAddress
from ..geometry import CubioId, FaceTurn
from ..surface import Field

TILT_TOLERANCE = 1e-6


class GamePhase(enum.Enum):
    RUNNING = "Running"
    WON = "Won"
    LOST = "Lost"
    FORFEIT = "Forfeit"


@dataclass(frozen=True)
class GameStatus:
    score: int
    phase: GamePhase
    message: str = ""


class TiltVector(NamedTuple):
    """Gravity direction in the global frame; unit length."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_unit(self, tol: float = TILT_TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tol


def tilt(x: float, y: float, z: float) -> TiltVector:
    """Normalize a raw direction into a valid TiltVector."""
    n = math.sqrt(x * x + y * y + z * z)
    if n == 0.0:
        raise ValueError("tilt direction cannot be zero")
    return TiltVector(x / n, y / n, z / n)


@dataclass(frozen=True)
class StructureEvent:
    kind: str  # "detach" or "attach"
    cubio: CubioId


class UnsupportedMove(Exception):
    """The game has no such move (e.g. slides outside TwentyThree)."""


@runtime_checkable
class GameRuntime(Protocol):
    name: str
    tick_count: int

    def on_turn(self, t: FaceTurn) -> None: ...
    def on_slide(self, frm: FacetAddress) -> None: ...
    def on_tilt(self, g: TiltVector) -> None: ...
    def on_tick(self) -> None: ...
    def on_structure(self, ev: StructureEvent) -> None: ...
    def field(self) -> Field: ...
    def status(self) -> GameStatus: ...
    def canonical_state(self) -> bytes: ...


class SurfaceGame:
    """Shared skeleton: counters, status plumbing, default reactions."""

    name = "?"

    def __init__(self, seed: int):
        self.seed = seed
        self.tick_count = 0
        self._score = 0
        self._phase = GamePhase.RUNNING
        self._message = ""

    def on_slide(self, frm: FacetAddress) -> None:
        raise UnsupportedMove(f"{self.name} has no slide moves")

    def on_tilt(self, g: TiltVector) -> None:
        pass

    def on_tick(self) -> None:
        self.tick_count += 1

    def on_structure(self, ev: StructureEvent) -> None:
        # the logical playfield survives structure changes untouched;
        # rendering of absent cubios is the surface layer's concern
        pass

    def status(self) -> GameStatus:
        return GameStatus(self._score, self._phase, self._message)


GAME_NAMES = ("twentythree", "wordmatch", "pacsurface", "colormix")


def make_game(name: str, seed: int, words: frozenset[str] | None = None):
    """Construct a game runtime by identifier."""
    from .colormix import ColorMix
    from .pacsurface import PacSurface
    from .twentythree import TwentyThree
    from .wordmatch import WordMatch

    if name == "twentythree":
        return TwentyThree(seed)
    if name == "wordmatch":
        return WordMatch(seed, words if words is not None else frozenset())
    if name == "pacsurface":
        return PacSurface(seed)
    if name == "colormix":
        return ColorMix(seed)
    raise KeyError(f"unknown game {name!r}")
