"""Session engine: event routing, policies, logs, replay, consistency."""

import json

import pytest

from cubios.faces import ALL_FACETS, FacetAddress, GlobalFace
from cubios.games import TiltVector
from cubios.games.twentythree import TwentyThree, blank_facet, facet_neighbors
from cubios.geometry import ALL_TURNS, Axis, FaceTurn, Spin
from cubios.session import (
    AttachEvent,
    CheatPolicy,
    CorruptLog,
    DetachEvent,
    IllegalEvent,
    SessionConfig,
    SessionEngine,
    SlideEvent,
    TiltEvent,
    TurnEvent,
    consistency_check,
    event_from_json,
    event_to_json,
    parse_log,
    replay,
    run,
)

UNIT = TiltVector(1.0, 0.0, 0.0)
CFG = SessionConfig(game="twentythree", seed=11)


def test_empty_session():
    d, log = run(CFG, [], ticks=5)
    assert d.final_score == 0
    assert d.final_phase == "Running"
    assert d.tick_count == 5
    assert len(log.splitlines()) == 2  # header + checksum, no events


def test_replay_reproduces_the_digest():
    events = [TurnEvent(1, ALL_TURNS[0]), TurnEvent(3, ALL_TURNS[7]), TiltEvent(4, UNIT)]
    d1, log = run(CFG, events)
    assert replay(log).to_json() == d1.to_json()


def test_rerun_is_byte_identical():
    events = [TurnEvent(1, ALL_TURNS[5]), TiltEvent(2, UNIT)]
    _, log1 = run(CFG, events, ticks=8)
    _, log2 = run(CFG, events, ticks=8)
    assert log1 == log2


def test_tampered_log_is_rejected():
    _, log = run(CFG, [TurnEvent(1, ALL_TURNS[0])])
    lines = log.splitlines()
    lines[1] = lines[1].replace('"tick": 1', '"tick": 2')
    with pytest.raises(CorruptLog):
        parse_log("".join(ln + "\n" for ln in lines))


def test_events_must_not_go_backwards():
    with pytest.raises(IllegalEvent):
        run(CFG, [TurnEvent(5, ALL_TURNS[0]), TurnEvent(2, ALL_TURNS[1])], ticks=8)


def test_forfeit_policy_ends_the_session():
    cfg = SessionConfig(game="twentythree", seed=11, policy=CheatPolicy.forfeit())
    d, log = run(cfg, [DetachEvent(2, 3)], ticks=10)
    assert d.final_phase == "Forfeit"
    assert d.tick_count == 3  # the forfeit tick completes, then the run stops
    assert replay(log).to_json() == d.to_json()


def test_penalize_policy_adds_the_points_literally():
    cfg = SessionConfig(
        game="twentythree", seed=11, policy=CheatPolicy.penalize(points=-50)
    )
    dp, _ = run(cfg, [DetachEvent(2, 3)], ticks=6)
    dn, _ = run(CFG, [], ticks=6)
    assert dp.final_score == dn.final_score - 50


def test_non_adjacent_slide_is_illegal():
    probe = TwentyThree(11)
    blank = blank_facet(probe.labeling)
    far = next(f for f in ALL_FACETS if f != blank and f not in facet_neighbors(blank))
    with pytest.raises(IllegalEvent):
        run(CFG, [SlideEvent(1, far)], ticks=3)


def test_slide_on_a_slide_less_game_is_illegal():
    cfg = SessionConfig(game="colormix", seed=11)
    with pytest.raises(IllegalEvent):
        run(cfg, [SlideEvent(1, FacetAddress(GlobalFace.U, 0, 0))], ticks=3)


def test_non_unit_tilt_is_illegal():
    cfg = SessionConfig(game="pacsurface", seed=5)
    with pytest.raises(IllegalEvent):
        run(cfg, [TiltEvent(1, TiltVector(3.0, 0.0, 0.0))], ticks=3)


@pytest.mark.parametrize("game", ["twentythree", "wordmatch", "colormix"])
def test_mesh_settles_after_a_turn_and_stays_consistent(game):
    eng = SessionEngine(SessionConfig(game=game, seed=7))
    eng.sim.elect()
    eng.apply_event(TurnEvent(0, FaceTurn(Axis.Z, 1, Spin.CW)))
    for _ in range(40):
        eng.tick()
        if eng.sim.quiescent() and eng.sim.all_synced():
            break
    else:
        raise AssertionError("mesh never drained after the turn")
    assert consistency_check(eng)


def test_pacsurface_mesh_drains_when_the_clock_pauses():
    # entities move most ticks, so replication keeps flowing while the
    # session clock runs; once it pauses the mesh must drain
    eng = SessionEngine(SessionConfig(game="pacsurface", seed=7))
    eng.sim.elect()
    for _ in range(30):
        eng.tick()
    for _ in range(40):
        eng.sim.tick()
        if eng.sim.quiescent():
            break
    else:
        raise AssertionError("mesh never drained")
    assert consistency_check(eng)


def test_detach_attach_churn_resyncs():
    eng = SessionEngine(
        SessionConfig(game="twentythree", seed=9, policy=CheatPolicy.accept())
    )
    leader = eng.sim.elect()
    victim = next(c for c in sorted(eng.assembly.cubios) if c != leader)
    pose = eng.assembly.cubios[victim]
    eng.apply_event(DetachEvent(0, victim))
    for _ in range(20):
        eng.tick()
    eng.apply_event(AttachEvent(20, victim, pose.pos, pose.rot))
    for _ in range(80):
        eng.tick()
        if eng.sim.quiescent() and eng.sim.all_synced():
            break
    else:
        raise AssertionError("mesh never resynced after churn")
    assert consistency_check(eng)


def test_event_codec_round_trips():
    pose = SessionEngine(CFG).assembly.cubios[6]
    events = [
        TurnEvent(1, ALL_TURNS[5]),
        SlideEvent(2, FacetAddress(GlobalFace.B, 1, 0)),
        TiltEvent(3, TiltVector(0.0, 1.0, 0.0)),
        DetachEvent(4, 6),
        AttachEvent(5, 6, pose.pos, pose.rot),
    ]
    for ev in events:
        wire = json.loads(json.dumps(event_to_json(ev)))
        assert event_from_json(wire) == ev


def test_corrupt_event_objects_are_rejected():
    with pytest.raises(CorruptLog):
        event_from_json({"tick": 1, "kind": "warp"})
    with pytest.raises(CorruptLog):
        event_from_json({"tick": 1, "kind": "turn", "axis": "W", "layer": 1, "dir": "cw"})


@pytest.mark.parametrize("game", ["twentythree", "wordmatch", "pacsurface", "colormix"])
def test_every_game_replays_byte_exact(game):
    cfg = SessionConfig(game=game, seed=23)
    events = [
        TurnEvent(1, ALL_TURNS[2]),
        TiltEvent(2, TiltVector(0.0, 0.0, 1.0)),
        TurnEvent(5, ALL_TURNS[10]),
    ]
    d, log = run(cfg, events, ticks=12)
    assert replay(log).to_json() == d.to_json()


def test_config_round_trips_through_json():
    cfg = SessionConfig(
        game="wordmatch",
        seed=99,
        policy=CheatPolicy.penalize(points=-10, time_ticks=4),
        loss_rate=0.1,
    )
    assert SessionConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg


def test_run_defaults_ticks_to_just_past_the_last_event():
    d, _ = run(CFG, [TurnEvent(4, ALL_TURNS[0])])
    assert d.tick_count == 5
