"""WebSocket server: roles, protocol, live frames, snapshot replay."""

import base64
import json

import numpy as np
from fastapi.testclient import TestClient

from cubios.faces import FacetAddress, GlobalFace, facet_index
from cubios.geometry import Axis, FaceTurn, Spin, facet_permutation
from cubios.server import create_app
from cubios.session import SessionConfig, replay


def _recv(ws, want_type, limit=400):
    for _ in range(limit):
        msg = json.loads(ws.receive_text())
        if msg["type"] == want_type:
            return msg
    raise AssertionError(f"no {want_type!r} message within {limit} messages")


def _facet_bytes(frame):
    return {
        facet_index(
            FacetAddress(GlobalFace[f["face"]], f["row"], f["col"])
        ): base64.b64decode(f["px"])
        for f in frame["facets"]
    }


def _client():
    return TestClient(create_app(SessionConfig(game="twentythree", seed=14)))


def test_first_client_controls_the_rest_watch():
    with _client() as client:
        with client.websocket_connect("/ws") as ws1:
            role1 = json.loads(ws1.receive_text())
            assert role1["type"] == "role"
            assert role1["role"] == "controller"
            assert role1["game"] == "twentythree"
            assert "tick" in role1
            with client.websocket_connect("/ws") as ws2:
                role2 = json.loads(ws2.receive_text())
                assert role2["role"] == "viewer"
                ws2.send_text(json.dumps({"type": "turn", "axis": "Y", "layer": 1, "dir": "cw"}))
                err = json.loads(ws2.receive_text())
                assert err["type"] == "error"
                assert err["role"] == "viewer"


def test_malformed_messages_get_an_error_reply():
    with _client() as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_text()  # role
            ws.send_text("this is not json")
            err = json.loads(ws.receive_text())
            assert err["type"] == "error"
            ws.send_text(json.dumps(["no", "type"]))
            err = json.loads(ws.receive_text())
            assert err["type"] == "error"


def test_turn_changes_exactly_the_permuted_facets():
    t = FaceTurn(Axis.Y, 1, Spin.CW)
    moved = {i for i, j in enumerate(facet_permutation(t)) if i != j}
    with _client() as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_text()  # role
            ws.send_text(json.dumps({"type": "start"}))
            base = _facet_bytes(_recv(ws, "frame"))
            ws.send_text(json.dumps({"type": "turn", "axis": "Y", "layer": 1, "dir": "cw"}))
            for _ in range(80):
                frame = _recv(ws, "frame")
                changed = {i for i, px in _facet_bytes(frame).items() if px != base[i]}
                if changed:
                    # all 24 tiles are distinct, so exactly the permuted
                    # facets show new content
                    assert changed == moved
                    break
            else:
                raise AssertionError("the turn never reached a frame")


def test_illegal_input_is_reported_not_fatal():
    with _client() as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_text()  # role
            ws.send_text(json.dumps({"type": "start"}))
            ws.send_text(json.dumps({"type": "tilt", "x": 3.0, "y": 0.0, "z": 0.0}))
            err = _recv(ws, "error")
            assert "unit" in err["error"]
            # the session keeps ticking afterwards
            s1 = _recv(ws, "status")
            s2 = _recv(ws, "status")
            assert s2["tick"] > s1["tick"]


def test_every_message_carries_the_tick():
    with _client() as client:
        with client.websocket_connect("/ws") as ws:
            msgs = [json.loads(ws.receive_text())]
            ws.send_text(json.dumps({"type": "start"}))
            for _ in range(9):
                msgs.append(json.loads(ws.receive_text()))
            assert all("tick" in m for m in msgs)
            kinds = {m["type"] for m in msgs}
            assert {"role", "frame", "status", "mesh"} <= kinds


def test_mesh_message_shape():
    with _client() as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_text()
            ws.send_text(json.dumps({"type": "start"}))
            mesh = _recv(ws, "mesh")
            assert {n["id"] for n in mesh["nodes"]} == set(range(8))
            allowed = {"BOOT", "PROBING", "SYNCED", "DEGRADED"}
            assert all(n["phase"] in allowed for n in mesh["nodes"])
            assert len(mesh["links"]) == 12
            assert all(len(pair) == 2 for pair in mesh["links"])


def test_snapshot_log_replays_to_the_shown_digest():
    with _client() as client:
        with client.websocket_connect("/ws") as ws:
            ws.receive_text()
            ws.send_text(json.dumps({"type": "start"}))
            ws.send_text(json.dumps({"type": "turn", "axis": "X", "layer": -1, "dir": "ccw"}))
            _recv(ws, "frame")
            for _ in range(3):
                _recv(ws, "status")
            snap = client.get("/snapshot").json()
            assert set(snap) == {"tick", "log", "digest"}
            assert replay(snap["log"]).to_json() == snap["digest"]


def test_placeholder_index_is_served_without_static_dir():
    with _client() as client:
        r = client.get("/")
        assert r.status_code == 200
        assert "cubios" in r.text.lower()
