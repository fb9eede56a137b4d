"""One play session, from event script to replayable log.

The engine advances geometry, mesh, and game in lockstep ticks.  All
inputs arrive as timestamped events; processing tick T means applying
the events stamped T, then one mesh tick, one game tick, and one
replication pass.  Everything downstream of (config, events) is
deterministic, so a session can be shipped as a JSONL log and replayed
bit-for-bit anywhere.

Log format: a header line carrying the config and the executed tick
count, one line per event, and a checksum trailer over the preceding
bytes.  Replay honors the recorded tick count, which makes logs cut
mid-flight (e.g. live serving snapshots) replay exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .faces import ALL_FACETS, FACE_NORMAL, FacetAddress, GlobalFace, Vec
from .geometry import (
    Assembly,
    Axis,
    CoreKind,
    CubioId,
    FaceTurn,
    Rot,
    Spin,
    add_cubio,
    apply_turn,
    new_standard_assembly,
    remove_cubio,
    rot_apply,
    rot_inv,
)
from .games import (
    GAME_NAMES,
    GamePhase,
    GameRuntime,
    StructureEvent,
    TiltVector,
    UnsupportedMove,
    make_game,
)
from .games.twentythree import NotAdjacent
from .games.wordmatch import load_dictionary
from .hashing import fnv1a64
from .mesh import MeshSim, NodeAttach, NodeDetach, boot
from .surface import FACET_PIXELS, LOCAL_DIRS, Field, facet_owner, render


class IllegalEvent(Exception):
    pass


class CorruptLog(Exception):
    pass


# ===== events ================================================================


@dataclass(frozen=True)
class TurnEvent:
    tick: int
    turn: FaceTurn


@dataclass(frozen=True)
class SlideEvent:
    tick: int
    facet: FacetAddress


@dataclass(frozen=True)
class TiltEvent:
    tick: int
    g: TiltVector


@dataclass(frozen=True)
class DetachEvent:
    tick: int
    cubio: CubioId


@dataclass(frozen=True)
class AttachEvent:
    tick: int
    cubio: CubioId
    pos: Vec
    rot: Rot


SessionEvent = TurnEvent | SlideEvent | TiltEvent | DetachEvent | AttachEvent


def event_to_json(ev: SessionEvent) -> dict:
    if isinstance(ev, TurnEvent):
        return {
            "tick": ev.tick,
            "kind": "turn",
            "axis": ev.turn.axis.name,
            "layer": ev.turn.layer,
            "dir": ev.turn.spin.value,
        }
    if isinstance(ev, SlideEvent):
        return {
            "tick": ev.tick,
            "kind": "slide",
            "face": ev.facet.face.name,
            "row": ev.facet.row,
            "col": ev.facet.col,
        }
    if isinstance(ev, TiltEvent):
        return {"tick": ev.tick, "kind": "tilt", "x": ev.g.x, "y": ev.g.y, "z": ev.g.z}
    if isinstance(ev, DetachEvent):
        return {"tick": ev.tick, "kind": "detach", "id": ev.cubio}
    if isinstance(ev, AttachEvent):
        return {
            "tick": ev.tick,
            "kind": "attach",
            "id": ev.cubio,
            "pos": list(ev.pos),
            "rot": [list(r) for r in ev.rot],
        }
    raise TypeError(f"not a session event: {ev!r}")


def event_from_json(obj: dict) -> SessionEvent:
    try:
        tick = int(obj["tick"])
        kind = obj["kind"]
        if kind == "turn":
            return TurnEvent(
                tick, FaceTurn(Axis[obj["axis"]], int(obj["layer"]), Spin(obj["dir"]))
            )
        if kind == "slide":
            return SlideEvent(
                tick,
                FacetAddress(GlobalFace[obj["face"]], int(obj["row"]), int(obj["col"])),
            )
        if kind == "tilt":
            return TiltEvent(
                tick, TiltVector(float(obj["x"]), float(obj["y"]), float(obj["z"]))
            )
        if kind == "detach":
            return DetachEvent(tick, int(obj["id"]))
        if kind == "attach":
            pos = tuple(int(x) for x in obj["pos"])
            rot = tuple(tuple(int(x) for x in row) for row in obj["rot"])
            return AttachEvent(tick, int(obj["id"]), pos, rot)  # type: ignore[arg-type]
    except (KeyError, ValueError, TypeError) as e:
        raise CorruptLog(f"bad event object {obj!r}: {e}") from e
    raise CorruptLog(f"unknown event kind {obj.get('kind')!r}")


# ===== config and policy =====================================================


@dataclass(frozen=True)
class CheatPolicy:
    mode: str  # "accept" | "penalize" | "forfeit"
    points: int = 0
    time_ticks: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("accept", "penalize", "forfeit"):
            raise ValueError(f"unknown cheat policy {self.mode!r}")

    @staticmethod
    def accept() -> "CheatPolicy":
        return CheatPolicy("accept")

    @staticmethod
    def penalize(points: int, time_ticks: int = 0) -> "CheatPolicy":
        return CheatPolicy("penalize", points, time_ticks)

    @staticmethod
    def forfeit() -> "CheatPolicy":
        return CheatPolicy("forfeit")


@dataclass(frozen=True)
class SessionConfig:
    game: str
    seed: int
    policy: CheatPolicy = CheatPolicy("accept")
    loss_rate: float = 0.0
    core: CoreKind = CoreKind.STEEL_BALL
    dictionary_path: str | None = None

    def __post_init__(self) -> None:
        if self.game not in GAME_NAMES:
            raise ValueError(f"unknown game {self.game!r}")

    def to_json(self) -> dict:
        return {
            "game": self.game,
            "seed": self.seed,
            "policy": {
                "mode": self.policy.mode,
                "points": self.policy.points,
                "time_ticks": self.policy.time_ticks,
            },
            "loss_rate": self.loss_rate,
            "core": self.core.value,
            "dictionary_path": self.dictionary_path,
        }

    @staticmethod
    def from_json(obj: dict) -> "SessionConfig":
        try:
            pol = obj["policy"]
            return SessionConfig(
                game=obj["game"],
                seed=int(obj["seed"]),
                policy=CheatPolicy(pol["mode"], int(pol["points"]), int(pol["time_ticks"])),
                loss_rate=float(obj["loss_rate"]),
                core=CoreKind(obj["core"]),
                dictionary_path=obj.get("dictionary_path"),
            )
        except (KeyError, ValueError, TypeError) as e:
            raise CorruptLog(f"bad config object: {e}") from e


@dataclass(frozen=True)
class SessionDigest:
    final_score: int
    final_phase: str
    state_hash: str  # 16 hex digits
    tick_count: int

    def to_json(self) -> dict:
        return {
            "final_score": self.final_score,
            "final_phase": self.final_phase,
            "state_hash": self.state_hash,
            "tick_count": self.tick_count,
        }


def default_dictionary() -> frozenset[str]:
    with resources.as_file(resources.files("cubios").joinpath("data/words.txt")) as p:
        return load_dictionary(str(p))[0]


# ===== the engine ============================================================


class SessionEngine:
    """Incremental session state; run() and the live server both drive it."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.assembly: Assembly = new_standard_assembly(config.core)
        self.sim: MeshSim = boot(self.assembly, config.seed, config.loss_rate)
        words = None
        if config.game == "wordmatch":
            if config.dictionary_path:
                words = load_dictionary(config.dictionary_path)[0]
            else:
                words = default_dictionary()
        self.game: GameRuntime = make_game(config.game, config.seed, words)
        self.tick_count = 0
        self.penalty_points = 0
        self.penalty_ticks = 0
        self.forfeited = False
        self.events: list[SessionEvent] = []
        self._replicated = 0

    # --- event routing -------------------------------------------------------

    def apply_event(self, ev: SessionEvent) -> None:
        """Route one event stamped with the current tick; logs it."""
        if self.forfeited:
            self.events.append(ev)  # recorded, ignored: the session is over
            return
        if isinstance(ev, TurnEvent):
            self.assembly = apply_turn(self.assembly, ev.turn)
            self.sim.turn_links(ev.turn)
            self.game.on_turn(ev.turn)
        elif isinstance(ev, SlideEvent):
            try:
                self.game.on_slide(ev.facet)
            except (UnsupportedMove, NotAdjacent) as e:
                raise IllegalEvent(str(e)) from e
        elif isinstance(ev, TiltEvent):
            if not ev.g.is_unit():
                raise IllegalEvent(f"tilt vector is not unit length: {ev.g}")
            self.game.on_tilt(ev.g)
        elif isinstance(ev, DetachEvent):
            try:
                after = remove_cubio(self.assembly, ev.cubio)
                self.sim.inject(NodeDetach(ev.cubio))
            except Exception as e:
                raise IllegalEvent(f"cannot detach {ev.cubio}: {e}") from e
            self.assembly = after
            self._apply_policy()
            self.game.on_structure(StructureEvent("detach", ev.cubio))
        elif isinstance(ev, AttachEvent):
            try:
                after = add_cubio(self.assembly, ev.cubio, ev.pos, ev.rot)
                self.sim.inject(NodeAttach(ev.cubio, ev.pos, ev.rot))
            except Exception as e:
                raise IllegalEvent(f"cannot attach {ev.cubio}: {e}") from e
            self.assembly = after
            self._apply_policy()
            self.game.on_structure(StructureEvent("attach", ev.cubio))
        else:
            raise IllegalEvent(f"unknown event {ev!r}")
        self.events.append(ev)

    def _apply_policy(self) -> None:
        mode = self.config.policy.mode
        if mode == "penalize":
            self.penalty_points += self.config.policy.points
            self.penalty_ticks += self.config.policy.time_ticks
        elif mode == "forfeit":
            self.forfeited = True

    # --- the clock -------------------------------------------------------------

    def tick(self) -> None:
        self.sim.tick()
        self.game.on_tick()
        self.tick_count += 1
        self._replicate_if_changed()

    def _replicate_if_changed(self) -> None:
        h = fnv1a64(self.game.canonical_state())
        if h != self._replicated and self.sim.leader() is not None:
            self.sim.replicate(h.to_bytes(8, "big"))
            self._replicated = h

    # --- summaries ---------------------------------------------------------------

    def game_hash(self) -> int:
        return fnv1a64(self.game.canonical_state())

    def state_hash(self) -> int:
        h = fnv1a64(repr(sorted(self.assembly.cubios.items())).encode())
        h = fnv1a64(self.game.canonical_state(), h)
        for cid, st in sorted(self.sim.states().items()):
            h = fnv1a64(repr((cid, st.game_hash)).encode(), h)
        h = fnv1a64(repr((self.penalty_points, self.penalty_ticks)).encode(), h)
        return h

    def digest(self) -> SessionDigest:
        status = self.game.status()
        phase = "Forfeit" if self.forfeited else status.phase.value
        return SessionDigest(
            final_score=status.score + self.penalty_points,
            final_phase=phase,
            state_hash=f"{self.state_hash():016x}",
            tick_count=self.tick_count,
        )

    def log_lines(self) -> list[str]:
        header = json.dumps(
            {"cubios_log": 1, "config": self.config.to_json(), "ticks": self.tick_count},
            sort_keys=True,
        )
        lines = [header] + [
            json.dumps(event_to_json(ev), sort_keys=True) for ev in self.events
        ]
        body = "".join(line + "\n" for line in lines)
        lines.append(json.dumps({"checksum": f"{fnv1a64(body.encode()):016x}"}))
        return lines

    def log_text(self) -> str:
        return "".join(line + "\n" for line in self.log_lines())


# ===== batch entry points ====================================================


def run_engine(
    config: SessionConfig, events: list[SessionEvent], ticks: int | None = None
) -> SessionEngine:
    """Execute a whole event script; returns the finished engine."""
    for a, b in zip(events, events[1:]):
        if b.tick < a.tick:
            raise IllegalEvent(f"events out of order at tick {b.tick} < {a.tick}")
    if ticks is None:
        ticks = events[-1].tick + 1 if events else 0
    engine = SessionEngine(config)
    i = 0
    for t in range(ticks):
        while i < len(events) and events[i].tick == t:
            engine.apply_event(events[i])
            i += 1
        engine.tick()
        if engine.forfeited:
            break
    return engine


def run(
    config: SessionConfig, events: list[SessionEvent], ticks: int | None = None
) -> tuple[SessionDigest, str]:
    """Execute a whole event script; returns (digest, log text)."""
    engine = run_engine(config, events, ticks)
    return engine.digest(), engine.log_text()


def parse_log(text: str) -> tuple[SessionConfig, list[SessionEvent], int]:
    """Validate a log's checksum and shape; returns (config, events, ticks)."""
    lines = text.splitlines()
    if len(lines) < 2:
        raise CorruptLog("log too short")
    body = "".join(line + "\n" for line in lines[:-1])
    try:
        trailer = json.loads(lines[-1])
        want = trailer["checksum"]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise CorruptLog(f"bad checksum trailer: {e}") from e
    got = f"{fnv1a64(body.encode()):016x}"
    if got != want:
        raise CorruptLog(f"checksum mismatch: log says {want}, content is {got}")
    try:
        header = json.loads(lines[0])
        if header.get("cubios_log") != 1:
            raise CorruptLog("not a session log")
        config = SessionConfig.from_json(header["config"])
        ticks = int(header["ticks"])
    except (json.JSONDecodeError, KeyError, ValueError) as e:
        raise CorruptLog(f"bad header: {e}") from e
    events = []
    for line in lines[1:-1]:
        try:
            events.append(event_from_json(json.loads(line)))
        except json.JSONDecodeError as e:
            raise CorruptLog(f"bad event line: {e}") from e
    return config, events, ticks


def replay(text: str) -> SessionDigest:
    """Re-run a log; bit-identical digest to the original run."""
    config, events, ticks = parse_log(text)
    digest, _ = run(config, events, ticks=ticks)
    return digest


# ===== cross-checks ==========================================================


def consistency_check(engine: SessionEngine) -> bool:
    """Replication and rendering agree with the engine's authoritative state.

    Meaningful when the mesh is quiescent: every live node must hold the
    replicated hash of the engine's game state, and the per-display
    render of the engine's field must cover exactly the present facets
    with correctly rotated pixels.
    """
    want = fnv1a64(engine.game.canonical_state())
    live = engine.sim.live_ids()
    if not live:
        return False
    hashes = {engine.sim.nodes[c].game_hash for c in live}
    if hashes != {fnv1a64(want.to_bytes(8, "big"))}:
        return False

    field = engine.game.field()
    buffers = render(field, engine.assembly)
    seen = set()
    for f in ALL_FACETS:
        try:
            owner = facet_owner(engine.assembly, f)
        except Exception:
            continue
        pose = engine.assembly.cubios[owner]
        inv = rot_inv(pose.rot)
        local = rot_apply(inv, FACE_NORMAL[f.face])
        idx = LOCAL_DIRS.index(local)
        if (owner, idx) not in buffers:
            return False
        seen.add((owner, idx))
        rect = field.facet_rect(f)
        buf = buffers[(owner, idx)]
        if buf.shape != (FACET_PIXELS, FACET_PIXELS, 3):
            return False
        ok = any(
            np.array_equal(np.rot90(rect, k), buf) for k in range(4)
        )
        if not ok:
            return False
    return seen == set(buffers)
