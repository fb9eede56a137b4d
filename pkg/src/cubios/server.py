"""Live session service: one session, one WebSocket endpoint, many viewers.

The first connected client is the controller; everyone else watches.
Client inputs are queued and applied at the next tick boundary, the
tick loop runs at 20 ticks per wall second once the controller sends
"start", and after every tick the server pushes frame, status, and
mesh messages to every client.  All session mutation happens inside
the single tick task, so reads (including the /snapshot endpoint) are
never torn.

Client messages mirror the session log's event fields, with "type" in
place of "kind" and no tick (the server stamps arrival):

    {"type": "turn", "axis": "Y", "layer": 1, "dir": "cw"}
    {"type": "slide", "face": "U", "row": 0, "col": 1}
    {"type": "tilt", "x": 0.0, "y": 1.0, "z": 0.0}
    {"type": "detach", "id": 3} / {"type": "attach", "id": 3, "pos": [...], "rot": [[...]]}
    {"type": "start"}

Every server message carries the current "tick".
"""

from __future__ import annotations

import asyncio
import base64
import contextlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .faces import ALL_FACETS
from .session import (
    CorruptLog,
    IllegalEvent,
    SessionConfig,
    SessionEngine,
    SessionEvent,
    event_from_json,
)

TICK_SECONDS = 0.05  # 20 ticks per wall second

_PLACEHOLDER = """<!doctype html>
<meta charset="utf-8"><title>cubios</title>
<body style="font-family: system-ui; margin: 4em auto; max-width: 40em">
<h1>cubios server</h1>
<p>The web UI is not built.  The WebSocket endpoint is live at
<code>/ws</code> and a session snapshot at <code>/snapshot</code>.</p>
"""


def client_to_event(obj: dict, tick: int) -> SessionEvent:
    """A client input message is a log event with "type" for "kind"
    and the tick stamped on arrival."""
    payload = dict(obj)
    payload["kind"] = payload.pop("type")
    payload["tick"] = tick
    return event_from_json(payload)


@dataclass
class _Hub:
    engine: SessionEngine
    started: bool = False
    controller: WebSocket | None = None
    clients: list[WebSocket] = field(default_factory=list)
    inbox: list[tuple[WebSocket, dict]] = field(default_factory=list)

    def role(self, ws: WebSocket) -> str:
        return "controller" if ws is self.controller else "viewer"


def _frame_message(hub: _Hub) -> str:
    tick = hub.engine.tick_count
    f = hub.engine.game.field()
    facets = []
    for addr in ALL_FACETS:
        px = base64.b64encode(f.facet_rect(addr).tobytes()).decode("ascii")
        facets.append(
            {"face": addr.face.name, "row": addr.row, "col": addr.col, "px": px}
        )
    return json.dumps({"type": "frame", "tick": tick, "facets": facets})


def _status_message(hub: _Hub) -> str:
    d = hub.engine.digest()
    return json.dumps(
        {
            "type": "status",
            "tick": hub.engine.tick_count,
            "score": d.final_score,
            "phase": d.final_phase,
            "started": hub.started,
        }
    )


def _mesh_message(hub: _Hub) -> str:
    sim = hub.engine.sim
    nodes = [
        {"id": cid, "phase": st.phase.value}
        for cid, st in sorted(sim.states().items())
        if cid not in sim.detached
    ]
    links = sorted(
        {tuple(sorted((a.cubio, b.cubio))) for a, b in sim.links.items()}
    )
    leader = sim.leader()
    return json.dumps(
        {
            "type": "mesh",
            "tick": hub.engine.tick_count,
            "nodes": nodes,
            "links": [list(l) for l in links],
            "leader": leader,
        }
    )


async def _send(ws: WebSocket, text: str) -> bool:
    try:
        await ws.send_text(text)
        return True
    except Exception:
        return False


async def _broadcast(hub: _Hub) -> None:
    messages = (_frame_message(hub), _status_message(hub), _mesh_message(hub))
    dead = []
    for ws in hub.clients:
        for m in messages:
            if not await _send(ws, m):
                dead.append(ws)
                break
    for ws in dead:
        _drop_client(hub, ws)


def _drop_client(hub: _Hub, ws: WebSocket) -> None:
    if ws in hub.clients:
        hub.clients.remove(ws)
    hub.inbox = [(w, o) for w, o in hub.inbox if w is not ws]
    if hub.controller is ws:
        hub.controller = hub.clients[0] if hub.clients else None


async def _run_tick(hub: _Hub) -> None:
    """Apply queued inputs, advance one tick, push updates."""
    queued, hub.inbox = hub.inbox, []
    for ws, obj in queued:
        try:
            hub.engine.apply_event(client_to_event(obj, hub.engine.tick_count))
        except (IllegalEvent, CorruptLog) as e:
            await _send(
                ws,
                json.dumps(
                    {"type": "error", "tick": hub.engine.tick_count, "error": str(e)}
                ),
            )
    hub.engine.tick()
    await _broadcast(hub)


async def _tick_loop(hub: _Hub) -> None:
    while True:
        await asyncio.sleep(TICK_SECONDS)
        if hub.started and not hub.engine.forfeited:
            await _run_tick(hub)


def create_app(config: SessionConfig, static_dir: str | None = None) -> FastAPI:
    hub = _Hub(engine=SessionEngine(config))

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(_tick_loop(hub))
        yield
        task.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await task

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub

    @app.get("/snapshot")
    def snapshot() -> JSONResponse:
        return JSONResponse(
            {
                "tick": hub.engine.tick_count,
                "log": hub.engine.log_text(),
                "digest": hub.engine.digest().to_json(),
            }
        )

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        hub.clients.append(ws)
        if hub.controller is None:
            hub.controller = ws
        await _send(
            ws,
            json.dumps(
                {
                    "type": "role",
                    "tick": hub.engine.tick_count,
                    "role": hub.role(ws),
                    "game": config.game,
                }
            ),
        )
        try:
            while True:
                raw = await ws.receive_text()
                tick = hub.engine.tick_count
                try:
                    obj = json.loads(raw)
                    if not isinstance(obj, dict) or "type" not in obj:
                        raise ValueError("message must be an object with a type")
                except ValueError as e:
                    await _send(
                        ws,
                        json.dumps({"type": "error", "tick": tick, "error": str(e)}),
                    )
                    continue
                if hub.role(ws) != "controller":
                    await _send(
                        ws,
                        json.dumps(
                            {
                                "type": "error",
                                "tick": tick,
                                "role": "viewer",
                                "error": "viewer role: inputs ignored",
                            }
                        ),
                    )
                    continue
                if obj["type"] == "start":
                    hub.started = True
                    await _broadcast(hub)
                    continue
                hub.inbox.append((ws, obj))
        except WebSocketDisconnect:
            pass
        finally:
            _drop_client(hub, ws)

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:

        @app.get("/")
        def index() -> HTMLResponse:
            return HTMLResponse(_PLACEHOLDER)

    return app
