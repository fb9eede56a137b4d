"""Invariant suites behind the `verify` command.

Each suite checks the build against an oracle that does not share code
with the thing under test: the group suite reads label transport off
cubio poses, the atlas suite folds pixel centers across cube edges in
3D, the mesh suite drives seeded simulations against the convergence
bounds, and the enumeration suite compares the reachable-state count
to the closed form 7! * 3^6.

A suite raises VerifyFailure on the first violated property and
otherwise reports one line per property checked.
"""

from __future__ import annotations

import time
from random import Random
from typing import Callable

from .faces import (
    ALL_FACETS,
    FACE_NORMAL,
    GlobalFace,
    facet_of_sticker,
)
from .geometry import (
    ALL_TURNS,
    CubioId,
    FaceTurn,
    apply_turn,
    enumerate_states,
    facet_permutation,
    new_standard_assembly,
    perm_compose,
    rot_apply,
    rot_inv,
    rot_mul,
    scramble,
    transport_labeling,
)
from .hashing import derive_seed
from .mesh import boot
from .session import (
    AttachEvent,
    CheatPolicy,
    DetachEvent,
    SessionConfig,
    SessionEngine,
    TurnEvent,
    consistency_check,
)
from .surface import FACE_PIXELS, Heading, SurfaceCoord, embed, heading_vec, step

Report = Callable[[str], None]

N_STATES = 3_674_160  # 7! * 3^6


class VerifyFailure(Exception):
    """First property a suite found violated."""


def _labels_after_assembly_turn(a, labels, t: FaceTurn) -> dict:
    """Transport a facet labeling by tracking physical stickers through
    apply_turn pose bookkeeping; never touches facet_permutation."""
    b = apply_turn(a, t)
    out = {}
    for cid, p0 in a.cubios.items():
        p1 = b.cubios[cid]
        rel = rot_mul(p1.rot, rot_inv(p0.rot))
        for axis in range(3):
            n = tuple(p0.pos[axis] if k == axis else 0 for k in range(3))
            f0 = facet_of_sticker(p0.pos, n)
            f1 = facet_of_sticker(p1.pos, rot_apply(rel, n))
            out[f1] = labels[f0]
    return out


def suite_group(budget: int = 1000, report: Report = print) -> None:
    t0 = time.perf_counter()
    a0 = new_standard_assembly()
    identity = tuple(range(24))
    for t in ALL_TURNS:
        a = a0
        p = identity
        for _ in range(4):
            a = apply_turn(a, t)
            p = perm_compose(p, facet_permutation(t))
        if a.cubios != a0.cubios:
            raise VerifyFailure(f"g^4 != id on Assembly for {t}")
        if p != identity:
            raise VerifyFailure(f"g^4 != id on Perm24 for {t}")
    report(f"group: g^4 = id on Assembly and Perm24 for all {len(ALL_TURNS)} generators")

    rng = Random(derive_seed(0, "verify", "group"))
    for i in range(budget):
        a, _ = scramble(rng.randrange(1 << 32), rng.randrange(12))
        labels = {f: rng.randrange(1 << 30) for f in ALL_FACETS}
        t = rng.choice(ALL_TURNS)
        via_perm = transport_labeling(labels, facet_permutation(t))
        via_poses = _labels_after_assembly_turn(a, labels, t)
        if via_perm != via_poses:
            raise VerifyFailure(
                f"commuting square broken: labeling {i}, turn {t}: "
                f"permutation and pose transport disagree"
            )
    report(
        f"group: commuting square holds on {budget} randomized labelings "
        f"({time.perf_counter() - t0:.2f}s)"
    )


def _fold_across_edge(p: tuple, na: tuple, nb: tuple) -> tuple:
    """Rotate a point of face A's plane onto face B's plane about their
    shared edge: the components along the two face normals swap."""
    ca = sum(p[k] * na[k] for k in range(3))
    cb = sum(p[k] * nb[k] for k in range(3))
    return tuple(p[k] - (ca - cb) * (na[k] - nb[k]) for k in range(3))


def suite_atlas(budget: int = 100, report: Report = print) -> None:
    t0 = time.perf_counter()
    n = FACE_PIXELS

    checked = 0
    for face in GlobalFace:
        for v in range(n):
            for u in range(n):
                c = SurfaceCoord(face, u, v)
                for h in Heading:
                    fwd = step(c, h)
                    back = step(fwd.coord, fwd.heading.reverse())
                    if back.coord != c or back.heading != h.reverse():
                        raise VerifyFailure(
                            f"step not invertible at {c} heading {h.name}: "
                            f"forward {fwd}, back {back}"
                        )
                    checked += 1
    report(
        f"atlas: step invertible on all {checked} (coord, heading) pairs "
        f"({time.perf_counter() - t0:.2f}s)"
    )

    rng = Random(derive_seed(0, "verify", "atlas"))
    circumference = 4 * n
    for i in range(budget):
        start = SurfaceCoord(
            GlobalFace(rng.randrange(6)), rng.randrange(n), rng.randrange(n)
        )
        h = Heading(rng.randrange(4))
        c, cur = start, h
        for _ in range(circumference):
            r = step(c, cur)
            c, cur = r.coord, r.heading
        if c != start or cur != h:
            raise VerifyFailure(
                f"geodesic from {start} heading {h.name} not closed after "
                f"{circumference} steps: ended {c} heading {cur.name}"
            )
    report(f"atlas: {budget} seeded geodesics close after {circumference} steps")

    edge_pixels = 0
    for face in GlobalFace:
        na = FACE_NORMAL[face]
        for h in Heading:
            nb = FACE_NORMAL[
                GlobalFace(
                    next(
                        g
                        for g in GlobalFace
                        if FACE_NORMAL[g] == heading_vec(face, h)
                    )
                )
            ]
            for k in range(n):
                if h is Heading.PU:
                    u, v = n - 1, k
                elif h is Heading.NU:
                    u, v = 0, k
                elif h is Heading.PV:
                    u, v = k, n - 1
                else:
                    u, v = k, 0
                r = step(SurfaceCoord(face, u, v), h)
                folded = _fold_across_edge(embed(face, u, v), na, nb)
                landed = embed(r.coord.face, r.coord.u, r.coord.v)
                if folded != landed:
                    raise VerifyFailure(
                        f"edge pixels not coincident: {face.name}({u},{v}) "
                        f"heading {h.name} folds to {folded} but step lands "
                        f"on {r.coord} at {landed}"
                    )
                edge_pixels += 1
    report(
        f"atlas: all 12 edges pixel-coincident under the 3D embedding "
        f"({edge_pixels} crossings checked)"
    )


def _converge(sim, limit: int) -> int | None:
    for t in range(limit + 1):
        if sim.all_synced():
            return t
        sim.tick()
    return t if sim.all_synced() else None


def suite_mesh(budget: int = 500, report: Report = print) -> None:
    t0 = time.perf_counter()
    a = new_standard_assembly()

    took = _converge(boot(a, 1, 0.0), 12)
    if took is None:
        raise VerifyFailure("lossless boot did not reach all-SYNCED within 12 ticks")
    report(f"mesh: lossless boot all-SYNCED in {took} ticks (bound 12)")

    misses = []
    worst = 0
    for seed in range(budget):
        took = _converge(boot(a, seed, 0.2), 64)
        if took is None:
            misses.append(seed)
        else:
            worst = max(worst, took)
    allowed = budget // 100
    if len(misses) > allowed:
        raise VerifyFailure(
            f"loss 0.2 convergence: {len(misses)}/{budget} runs missed the "
            f"64-tick bound (allowed {allowed}); seeds {misses[:10]}"
        )
    report(
        f"mesh: loss 0.2 converged in {budget - len(misses)}/{budget} seeded "
        f"runs within 64 ticks (worst {worst}, {time.perf_counter() - t0:.2f}s)"
    )

    eng = SessionEngine(
        SessionConfig(game="twentythree", seed=5, policy=CheatPolicy.accept())
    )
    lead = eng.sim.elect()
    eng.apply_event(TurnEvent(0, ALL_TURNS[4]))
    for _ in range(8):
        eng.tick()
    victim: CubioId = next(c for c in sorted(eng.assembly.cubios) if c != lead)
    pose = eng.assembly.cubios[victim]
    eng.apply_event(DetachEvent(8, victim))
    for _ in range(12):
        eng.tick()
    eng.apply_event(AttachEvent(20, victim, pose.pos, pose.rot))
    eng.apply_event(TurnEvent(20, ALL_TURNS[9]))
    settled = False
    for _ in range(96):
        eng.tick()
        if eng.sim.quiescent() and eng.sim.all_synced():
            settled = True
            break
    if not settled:
        raise VerifyFailure("churn scenario did not re-converge within 96 ticks")
    if not consistency_check(eng):
        raise VerifyFailure("churn scenario failed the replication/render cross-check")
    report("mesh: turn + detach/reattach churn re-converged and passed consistency_check")


def suite_full_enum(budget: int | None = None, report: Report = print) -> None:
    t0 = time.perf_counter()
    result = enumerate_states()
    report(str(result.count))
    if result.count != N_STATES:
        raise VerifyFailure(
            f"enumeration found {result.count} states, expected {N_STATES} (7! * 3^6)"
        )
    report(
        f"full-enum: {result.count} reachable states in {len(result.depth_counts) - 1} "
        f"grip depths ({time.perf_counter() - t0:.1f}s)"
    )


SUITES: dict[str, Callable[..., None]] = {
    "group": suite_group,
    "atlas": suite_atlas,
    "mesh": suite_mesh,
    "full-enum": suite_full_enum,
}

DEFAULT_BUDGETS = {"group": 1000, "atlas": 100, "mesh": 500, "full-enum": 0}


def run_suite(name: str, budget: int | None = None, report: Report = print) -> None:
    """Run one named suite; VerifyFailure propagates to the caller."""
    if name not in SUITES:
        raise VerifyFailure(f"unknown suite {name!r}; have {sorted(SUITES)}")
    if name == "full-enum":
        suite_full_enum(report=report)
    else:
        SUITES[name](budget if budget is not None else DEFAULT_BUDGETS[name], report)
