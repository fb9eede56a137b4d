"""Deterministic simulation of the cubio firmware mesh.

Virtual time advances in whole ticks; sending a frame on a link delivers
it (or drops it, with the sim's seeded RNG) exactly one tick later.  The
simulation owns a mirror of the physical assembly purely to decide which
ports touch which; the node state machines never read it.  Nodes observe
the world only through port up/down events and received frames, which is
what lets the same logic believe a 7-cubio ring as readily as the full
cube.

Protocol sketch (one frame kind per concern):

  HELLO   introduces a node on a freshly mated port, carries its applied
          replication sequence so the peer can replay missed deltas
  TOPO    one node's adjacency row (origin, version, neighbor ids),
          version-flooded; rows unreachable from a node via mutually
          confirmed edges are pruned from its view
  ELECT   (origin, nonce, topology fingerprint); every node floods one
          nonce per fingerprint, highest nonce wins, ties to lowest id
  LEADER  the winner's confirmation flood
  DELTA   replicated game-state digests, applied in sequence order
  ACK     cumulative per-port acknowledgement; everything except ACK is
          retransmitted every 4 ticks until acknowledged

A node leaves PROBING for SYNCED once its probe window (3 ticks) has
passed, every mated port has introduced itself, and its topology view is
closed: all mentioned nodes have rows, all edges are mutually listed,
and the whole view is one component around the node itself.  Any later
inconsistency demotes it to DEGRADED until flooding restores closure.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

from .geometry import (
    Assembly,
    CubioId,
    CubioPose,
    FaceTurn,
    Rot,
    ROT_IDENTITY,
    add_cubio,
    apply_turn,
    contacts,
    remove_cubio,
    rot_apply,
    rot_inv,
)
from .faces import Vec
from .hashing import derive_seed, fnv1a64
from .surface import LOCAL_DIRS

RETRANSMIT_TICKS = 4
PROBE_WINDOW = 3
TURN_REMATE_TICKS = 2


class FrameKind(enum.Enum):
    HELLO = "HELLO"
    TOPO = "TOPO"
    ELECT = "ELECT"
    LEADER = "LEADER"
    DELTA = "DELTA"
    ACK = "ACK"


class Phase(enum.Enum):
    BOOT = "BOOT"
    PROBING = "PROBING"
    SYNCED = "SYNCED"
    DEGRADED = "DEGRADED"


class Port(NamedTuple):
    cubio: CubioId
    face: int  # local face index into surface.LOCAL_DIRS


@dataclass(frozen=True)
class Frame:
    kind: FrameKind
    src: CubioId
    seq: int
    payload: tuple


class UnknownEntity(Exception):
    pass


class NoQuorum(Exception):
    pass


# ===== inject events ========================================================


@dataclass(frozen=True)
class LinkDown:
    port: Port


@dataclass(frozen=True)
class LinkUp:
    a: Port
    b: Port


@dataclass(frozen=True)
class NodeDetach:
    cubio: CubioId


@dataclass(frozen=True)
class NodeAttach:
    cubio: CubioId
    pos: Vec
    rot: Rot = ROT_IDENTITY


MeshEvent = LinkDown | LinkUp | NodeDetach | NodeAttach


# ===== per-port reliable channel ===========================================


@dataclass
class _Channel:
    next_out: int = 0
    expect_in: int = 0
    unacked: list = field(default_factory=list)
    held: dict = field(default_factory=dict)  # out-of-order arrivals, seq -> Frame
    last_tx: int = -(10**9)


# ===== node state machine ===================================================


class NodeState(NamedTuple):
    phase: Phase
    neighbor_view: dict[int, CubioId]
    topo_view: dict[CubioId, tuple[CubioId, ...]]
    leader: CubioId | None
    game_hash: int


class _Node:
    """One cubio's firmware.  Sees only port events and frames."""

    def __init__(self, cid: CubioId, seed: int):
        self.id = cid
        self.rng = random.Random(derive_seed(seed, "node", cid))
        self.phase = Phase.BOOT
        self.mated: set[int] = set()
        self.neighbors: dict[int, CubioId] = {}  # port -> peer id
        self.rows: dict[CubioId, tuple[int, tuple[CubioId, ...]]] = {}
        self.row_version = 0
        self.chan: dict[int, _Channel] = {}
        self.probe_start = 0
        self.kept: tuple[CubioId, ...] = (cid,)
        self.leaders: dict[int, CubioId] = {}  # fingerprint -> leader
        self.nonces: dict[int, dict[CubioId, int]] = {}
        self.my_nonce: dict[int, int] = {}
        self.seen_elect: set[tuple[int, CubioId]] = set()
        self.seen_leader: set[tuple[int, CubioId]] = set()
        self.applied_seq = 0
        self.deltas: dict[int, bytes] = {}  # full replication history
        self.pending_deltas: dict[int, bytes] = {}
        self.game_hash = 0
        self.outbox: list[tuple[int, Frame]] = []

    # --- sending ------------------------------------------------------------

    def _send(self, port: int, kind: FrameKind, payload: tuple, now: int) -> None:
        ch = self.chan.setdefault(port, _Channel())
        frame = Frame(kind, self.id, ch.next_out, payload)
        if not ch.unacked:
            ch.last_tx = now  # the retransmit timer follows the oldest unacked frame
        ch.unacked.append(frame)
        ch.next_out += 1
        self.outbox.append((port, frame))

    def _send_ack(self, port: int, cum: int, now: int) -> None:
        self.outbox.append((port, Frame(FrameKind.ACK, self.id, cum, ())))

    def _flood(self, kind: FrameKind, payload: tuple, now: int, skip: int | None = None) -> None:
        for port in sorted(self.mated):
            if port != skip:
                self._send(port, kind, payload, now)

    # --- topology bookkeeping -------------------------------------------------

    def _own_row(self) -> tuple[CubioId, ...]:
        return tuple(sorted(set(self.neighbors.values())))

    def _bump_row(self, now: int) -> None:
        self.row_version += 1
        self.rows[self.id] = (self.row_version, self._own_row())
        self._flood(FrameKind.TOPO, (self.id, self.row_version, self._own_row()), now)
        self._reconsider(now)

    def _prune(self) -> tuple[CubioId, ...]:
        """Component of self under mutually confirmed edges.

        Rows outside the component stay in self.rows: flooding forwards
        each row version at most once per link, so a deleted row could
        never be re-learnt.  Excluding them from the kept view is enough;
        they rejoin it by themselves once the edges agree again.
        """
        keep = {self.id}
        frontier = [self.id]
        while frontier:
            nid = frontier.pop()
            _, nbrs = self.rows.get(nid, (0, ()))
            for b in nbrs:
                if b in keep or b not in self.rows:
                    continue
                if nid in self.rows[b][1]:
                    keep.add(b)
                    frontier.append(b)
        return tuple(sorted(keep))

    def _is_closed(self) -> bool:
        for nid in self.kept:
            if nid not in self.rows:
                return False
            for b in self.rows[nid][1]:
                if b not in self.rows or nid not in self.rows[b][1]:
                    return False
        return all(p in self.neighbors for p in self.mated)

    def fingerprint(self) -> int:
        h = 14695981039346656037
        for nid in self.kept:
            h = fnv1a64(repr((nid, self.rows.get(nid, (0, ()))[1])).encode(), h)
        return h

    def current_leader(self) -> CubioId | None:
        return self.leaders.get(self.fingerprint())

    def _reconsider(self, now: int) -> None:
        if self.phase is Phase.BOOT:
            return
        if self.id not in self.rows:
            self.rows[self.id] = (self.row_version, self._own_row())
        self.kept = self._prune()
        closed = self._is_closed() and now - self.probe_start >= PROBE_WINDOW
        if closed:
            self.phase = Phase.SYNCED
            self._maybe_start_election(now)
            self._maybe_finish_election(now)
        elif self.phase is Phase.SYNCED:
            self.phase = Phase.DEGRADED

    # --- election -------------------------------------------------------------

    def _maybe_start_election(self, now: int) -> None:
        fp = self.fingerprint()
        if fp in self.leaders or fp in self.my_nonce:
            return
        nonce = self.rng.getrandbits(64)
        self.my_nonce[fp] = nonce
        self.nonces.setdefault(fp, {})[self.id] = nonce
        self.seen_elect.add((fp, self.id))
        self._flood(FrameKind.ELECT, (self.id, nonce, fp), now)

    def _maybe_finish_election(self, now: int) -> None:
        fp = self.fingerprint()
        if fp in self.leaders:
            return
        votes = self.nonces.get(fp, {})
        if not set(self.kept) <= set(votes):
            return
        winner = max(self.kept, key=lambda nid: (votes[nid], -nid))
        self.leaders[fp] = winner
        if winner == self.id:
            self.seen_leader.add((fp, self.id))
            self._flood(FrameKind.LEADER, (self.id, fp), now)

    # --- replication ------------------------------------------------------------

    def originate_delta(self, payload: bytes, now: int) -> int:
        seq = self.applied_seq + 1
        self._apply_delta(seq, payload)
        self._flood(FrameKind.DELTA, (seq, payload), now)
        return seq

    def _apply_delta(self, seq: int, payload: bytes) -> None:
        self.applied_seq = seq
        self.deltas[seq] = payload
        self.game_hash = fnv1a64(payload)

    def _absorb_delta(self, seq: int, payload: bytes, now: int, from_port: int | None) -> None:
        if seq <= self.applied_seq or seq in self.pending_deltas:
            return
        self.pending_deltas[seq] = payload
        self._flood(FrameKind.DELTA, (seq, payload), now, skip=from_port)
        while self.applied_seq + 1 in self.pending_deltas:
            nxt = self.applied_seq + 1
            self._apply_delta(nxt, self.pending_deltas.pop(nxt))

    # --- events ---------------------------------------------------------------

    def on_port_up(self, port: int, now: int) -> None:
        self.mated.add(port)
        self.chan[port] = _Channel()
        if self.phase is not Phase.BOOT:
            self._send(port, FrameKind.HELLO, (self.applied_seq,), now)
            self._reconsider(now)

    def on_port_down(self, port: int, now: int) -> None:
        self.mated.discard(port)
        self.chan.pop(port, None)
        if self.neighbors.pop(port, None) is not None:
            self._bump_row(now)
        else:
            self._reconsider(now)

    def on_tick(self, now: int) -> None:
        if self.phase is Phase.BOOT:
            self.phase = Phase.PROBING
            self.probe_start = now
            self.rows[self.id] = (self.row_version, self._own_row())
            for port in sorted(self.mated):
                self._send(port, FrameKind.HELLO, (self.applied_seq,), now)
            return
        for port in sorted(self.chan):
            ch = self.chan[port]
            if ch.unacked and now - ch.last_tx >= RETRANSMIT_TICKS:
                ch.last_tx = now
                for frame in ch.unacked:
                    self.outbox.append((port, frame))
        if self.phase in (Phase.PROBING, Phase.DEGRADED):
            self._reconsider(now)

    def on_frame(self, port: int, frame: Frame, now: int) -> None:
        if frame.kind is FrameKind.ACK:
            ch = self.chan.get(port)
            if ch:
                ch.unacked = [f for f in ch.unacked if f.seq > frame.seq]
            return
        ch = self.chan.setdefault(port, _Channel())
        if frame.seq > ch.expect_in:
            ch.held[frame.seq] = frame  # hold until the gap is retransmitted
            return
        if frame.seq < ch.expect_in:
            self._send_ack(port, ch.expect_in - 1, now)
            return
        ch.held[frame.seq] = frame
        while ch.expect_in in ch.held:
            ready = ch.held.pop(ch.expect_in)
            ch.expect_in += 1
            self._dispatch(port, ready, now)
        self._send_ack(port, ch.expect_in - 1, now)

    def _dispatch(self, port: int, frame: Frame, now: int) -> None:
        handler = {
            FrameKind.HELLO: self._on_hello,
            FrameKind.TOPO: self._on_topo,
            FrameKind.ELECT: self._on_elect,
            FrameKind.LEADER: self._on_leader,
            FrameKind.DELTA: self._on_delta,
        }[frame.kind]
        handler(port, frame, now)

    def _on_hello(self, port: int, frame: Frame, now: int) -> None:
        (their_applied,) = frame.payload
        changed = self.neighbors.get(port) != frame.src
        self.neighbors[port] = frame.src
        for nid in sorted(self.rows):
            ver, nbrs = self.rows[nid]
            self._send(port, FrameKind.TOPO, (nid, ver, nbrs), now)
        for seq in range(their_applied + 1, self.applied_seq + 1):
            if seq in self.deltas:
                self._send(port, FrameKind.DELTA, (seq, self.deltas[seq]), now)
        if changed:
            self._bump_row(now)

    def _on_topo(self, port: int, frame: Frame, now: int) -> None:
        origin, version, nbrs = frame.payload
        if origin == self.id:
            return
        if origin in self.rows and self.rows[origin][0] >= version:
            return
        self.rows[origin] = (version, tuple(nbrs))
        self._flood(FrameKind.TOPO, (origin, version, tuple(nbrs)), now, skip=port)
        self._reconsider(now)

    def _on_elect(self, port: int, frame: Frame, now: int) -> None:
        origin, nonce, fp = frame.payload
        if (fp, origin) in self.seen_elect:
            return
        self.seen_elect.add((fp, origin))
        self.nonces.setdefault(fp, {})[origin] = nonce
        self._flood(FrameKind.ELECT, (origin, nonce, fp), now, skip=port)
        if self.phase is Phase.SYNCED:
            self._maybe_finish_election(now)

    def _on_leader(self, port: int, frame: Frame, now: int) -> None:
        leader, fp = frame.payload
        if (fp, leader) in self.seen_leader:
            return
        self.seen_leader.add((fp, leader))
        self.leaders.setdefault(fp, leader)
        self._flood(FrameKind.LEADER, (leader, fp), now, skip=port)

    def _on_delta(self, port: int, frame: Frame, now: int) -> None:
        seq, payload = frame.payload
        self._absorb_delta(seq, payload, now, port)

    def state(self) -> NodeState:
        return NodeState(
            phase=self.phase,
            neighbor_view=dict(sorted(self.neighbors.items())),
            topo_view={nid: self.rows[nid][1] for nid in self.kept if nid in self.rows},
            leader=self.current_leader(),
            game_hash=self.game_hash,
        )


# ===== the simulation =========================================================


def _connector_ports(pose: CubioPose) -> list[int]:
    inv = rot_inv(pose.rot)
    ports = []
    for axis in range(3):
        inward = tuple((-pose.pos[k] if k == axis else 0) for k in range(3))
        ports.append(LOCAL_DIRS.index(rot_apply(inv, inward)))
    return sorted(ports)


def _port_between(a: Assembly, cid: CubioId, towards: Vec) -> Port:
    pose = a.cubios[cid]
    local = rot_apply(rot_inv(pose.rot), towards)
    return Port(cid, LOCAL_DIRS.index(local))


def _derive_links(a: Assembly) -> list[tuple[Port, Port]]:
    out = []
    for ida, idb, d in contacts(a):
        out.append((_port_between(a, ida, d), _port_between(a, idb, tuple(-x for x in d))))
    return out


class MeshSim:
    """Owner of nodes, links and the virtual clock.  Mutated in place;
    every run with the same seed and call sequence is identical."""

    def __init__(self, a: Assembly, seed: int, loss_rate: float = 0.0,
                 trace: Callable[[dict], None] | None = None):
        self.assembly = a
        self.seed = seed
        self.loss_rate = loss_rate
        self.trace = trace
        self.clock = 0
        self.rng = random.Random(derive_seed(seed, "loss"))
        self.nodes: dict[CubioId, _Node] = {
            cid: _Node(cid, seed) for cid in sorted(a.cubios)
        }
        self.detached: set[CubioId] = set()
        self.links: dict[Port, Port] = {}
        self._pending: list[tuple[int, int, Port, Port, Frame]] = []
        self._send_count = 0
        self._link_schedule: list[tuple[int, Port, Port]] = []
        for pa, pb in _derive_links(a):
            self._link_up(pa, pb)
        self._flush()

    # --- link plumbing ----------------------------------------------------------

    def _link_up(self, pa: Port, pb: Port) -> None:
        if pa in self.links or pb in self.links:
            raise UnknownEntity(f"port already mated: {pa} or {pb}")
        self.links[pa] = pb
        self.links[pb] = pa
        for p in (pa, pb):
            if p.cubio not in self.detached:
                self.nodes[p.cubio].on_port_up(p.face, self.clock)

    def _link_down(self, pa: Port) -> None:
        pb = self.links.pop(pa, None)
        if pb is None:
            return
        self.links.pop(pb, None)
        self._pending = [
            e for e in self._pending if e[2] not in (pa, pb) and e[3] not in (pa, pb)
        ]
        for p in (pa, pb):
            if p.cubio not in self.detached:
                self.nodes[p.cubio].on_port_down(p.face, self.clock)

    def _flush(self) -> None:
        for cid in sorted(self.nodes):
            node = self.nodes[cid]
            if cid in self.detached:
                node.outbox.clear()
                continue
            for port, frame in node.outbox:
                src = Port(cid, port)
                dst = self.links.get(src)
                if dst is not None:
                    self._send_count += 1
                    self._pending.append((self.clock + 1, self._send_count, src, dst, frame))
            node.outbox.clear()

    # --- public operations ---------------------------------------------------------

    def tick(self) -> None:
        self.clock += 1
        due_links = [e for e in self._link_schedule if e[0] == self.clock]
        self._link_schedule = [e for e in self._link_schedule if e[0] != self.clock]
        if due_links:
            # a turn issued after the scheduling turn may have moved either
            # cubio or already remated the port; only still-physical pairs engage
            current = {frozenset(pair) for pair in _derive_links(self.assembly)}
            for _, pa, pb in due_links:
                if pa in self.links or pb in self.links:
                    continue
                if frozenset((pa, pb)) not in current:
                    continue
                self._link_up(pa, pb)
        due = sorted((e for e in self._pending if e[0] == self.clock), key=lambda e: e[1])
        self._pending = [e for e in self._pending if e[0] != self.clock]
        for _, _, src, dst, frame in due:
            if self.links.get(src) != dst or dst.cubio in self.detached:
                continue
            dropped = self.loss_rate > 0 and self.rng.random() < self.loss_rate
            if self.trace:
                self.trace({
                    "tick": self.clock,
                    "kind": frame.kind.value,
                    "src": src.cubio,
                    "dst": dst.cubio,
                    "dropped": dropped,
                    "seq": frame.seq,
                })
            if not dropped:
                self.nodes[dst.cubio].on_frame(dst.face, frame, self.clock)
        for cid in sorted(self.nodes):
            if cid not in self.detached:
                self.nodes[cid].on_tick(self.clock)
        self._flush()

    def inject(self, ev: MeshEvent) -> None:
        if isinstance(ev, LinkDown):
            if ev.port not in self.links:
                raise UnknownEntity(f"{ev.port} is not linked")
            self._link_down(ev.port)
        elif isinstance(ev, LinkUp):
            self._link_up(ev.a, ev.b)
        elif isinstance(ev, NodeDetach):
            if ev.cubio not in self.nodes or ev.cubio in self.detached:
                raise UnknownEntity(f"no attached node {ev.cubio}")
            for port in [p for p in self.links if p.cubio == ev.cubio]:
                self._link_down(port)
            self.detached.add(ev.cubio)
            self.assembly = remove_cubio(self.assembly, ev.cubio)
        elif isinstance(ev, NodeAttach):
            self._attach(ev)
        else:
            raise UnknownEntity(f"unknown mesh event {ev!r}")
        self._flush()

    def _attach(self, ev: NodeAttach) -> None:
        if ev.cubio in self.nodes and ev.cubio not in self.detached:
            raise UnknownEntity(f"node {ev.cubio} already attached")
        self.assembly = add_cubio(self.assembly, ev.cubio, ev.pos, ev.rot)
        if ev.cubio in self.detached:
            self.detached.discard(ev.cubio)
        else:
            self.nodes[ev.cubio] = _Node(ev.cubio, self.seed)
        pose = self.assembly.cubios[ev.cubio]
        by_pos = {p.pos: cid for cid, p in self.assembly.cubios.items()}
        for axis in range(3):
            for sign in (-1, 1):
                q = tuple(pose.pos[k] + (2 * sign if k == axis else 0) for k in range(3))
                other = by_pos.get(q)  # type: ignore[arg-type]
                if other is None or other == ev.cubio:
                    continue
                d = tuple((sign if k == axis else 0) for k in range(3))
                self._link_up(
                    _port_between(self.assembly, ev.cubio, d),
                    _port_between(self.assembly, other, tuple(-x for x in d)),
                )

    def turn_links(self, t: FaceTurn) -> None:
        """The physical consequence of a turn: the four inter-layer links
        break now and the new matings engage TURN_REMATE_TICKS later."""
        moved = {
            cid for cid, pose in self.assembly.cubios.items() if pose.pos[t.axis] == t.layer
        }
        for pa in sorted(p for p in self.links if p.cubio in moved):
            pb = self.links.get(pa)
            if pb is not None and pb.cubio not in moved:
                self._link_down(pa)
        self.assembly = apply_turn(self.assembly, t)
        after = _derive_links(self.assembly)
        when = self.clock + TURN_REMATE_TICKS
        for pa, pb in after:
            if pa not in self.links and pb not in self.links:
                in_moved = (pa.cubio in moved) != (pb.cubio in moved)
                if in_moved:
                    self._link_schedule.append((when, pa, pb))
        self._flush()

    def elect(self, budget: int = 64) -> CubioId:
        """Tick until every live node is SYNCED on one topology fingerprint
        with one agreed live leader, then return it.  A mesh that cannot get
        there (no nodes, or genuinely split views) raises NoQuorum."""
        if not self.live_ids():
            raise NoQuorum("no nodes to elect from")
        for _ in range(budget + 1):
            live = [self.nodes[c] for c in self.live_ids()]
            if all(n.phase is Phase.SYNCED for n in live):
                fps = {n.fingerprint() for n in live}
                leaders = {n.current_leader() for n in live}
                if len(fps) == 1 and len(leaders) == 1:
                    leader = leaders.pop()
                    if leader is not None and leader in self.live_ids():
                        return leader
            self.tick()
        fps = {n.fingerprint() for n in self._live_synced()}
        if len(fps) > 1:
            raise NoQuorum("topology views disagree")
        raise NoQuorum("election did not converge within budget")

    def replicate(self, delta: bytes) -> int:
        leader = self.leader()
        if leader is None:
            raise NoQuorum("no agreed leader to replicate from")
        seq = self.nodes[leader].originate_delta(delta, self.clock)
        self._flush()
        return seq

    # --- inspection -------------------------------------------------------------

    def _live_synced(self) -> list[_Node]:
        return [
            n for cid, n in sorted(self.nodes.items())
            if cid not in self.detached and n.phase is Phase.SYNCED
        ]

    def leader(self) -> CubioId | None:
        synced = self._live_synced()
        leaders = {n.current_leader() for n in synced}
        if synced and len(leaders) == 1:
            lead = leaders.pop()
            # a freshly detached leader may linger in stale views; not usable
            if lead is not None and lead not in self.detached:
                return lead
        return None

    def quiescent(self) -> bool:
        """No frames in flight and no remating scheduled."""
        return not self._pending and not self._link_schedule

    def states(self) -> dict[CubioId, NodeState]:
        return {cid: n.state() for cid, n in sorted(self.nodes.items())}

    def live_ids(self) -> tuple[CubioId, ...]:
        return tuple(cid for cid in sorted(self.nodes) if cid not in self.detached)

    def all_synced(self) -> bool:
        return all(self.nodes[c].phase is Phase.SYNCED for c in self.live_ids())

    def link_pairs(self) -> set[frozenset]:
        return {frozenset((a, b)) for a, b in self.links.items()}

    def degrees(self) -> dict[CubioId, int]:
        deg: dict[CubioId, int] = {cid: 0 for cid in self.live_ids()}
        for p in self.links:
            if p.cubio in deg:
                deg[p.cubio] += 1
        return deg


def boot(a: Assembly, seed: int, loss_rate: float = 0.0,
         trace: Callable[[dict], None] | None = None) -> MeshSim:
    """Power on one node per cubio with links wherever cubios touch."""
    return MeshSim(a, seed, loss_rate, trace)
