"""Live session boundary: WebSocket frame streaming plus human input.

Play is turn-gated: when a human-controlled agent must act, the server
broadcasts ``await_action`` and the episode loop blocks (with a deadline;
noop on expiry) until that client submits an action. One human client per
human slot, unlimited spectators.

Protocol (one JSON object per WebSocket text frame, path ``/session``):

client -> server
    {"type": "join", "role": "human"|"spectator", "agent_id": N}
    {"type": "action", "agent_id": N, "action": "up"}
    {"type": "ping"}
server -> client
    {"type": "joined", "role": ..., "agent_id": ..., "header": {...}}
    {"type": "frame", "frame": {...}}
    {"type": "await_action", "agent_id": N, "deadline_ms": M}
    {"type": "epoch_end", "metrics": {...}}
    {"type": "run_end"}
    {"type": "pong"}
    {"type": "error", "message": "..."}

Unknown or malformed client messages get an ``error`` reply; the
connection stays open. The finished run's replay file is served at
``/replay`` and the static UI bundle at ``/``.
"""

from __future__ import annotations

import asyncio
import itertools
import logging
import tempfile
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import asdict
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .models import HumanActionSource
from .replay import ReplayHeader
from .rng import split_seed
from .runner import ExperimentConfig, build_env, run_experiment

log = logging.getLogger("magrid.server")

SPECTATOR_QUEUE_LIMIT = 256


class _Client:
    _ids = itertools.count()

    def __init__(self):
        self.id = next(_Client._ids)
        self.queue: asyncio.Queue = asyncio.Queue()
        self.role: Optional[str] = None  # None until joined
        self.agent_id: Optional[int] = None


class SessionHub:
    """Shared state between the episode loop thread and the socket tasks."""

    def __init__(self, header: ReplayHeader, action_names: tuple[str, ...], human_slots: set[int]):
        self.header = header
        self.action_names = action_names
        self.human_slots = {slot: None for slot in sorted(human_slots)}  # slot -> client id
        self.clients: dict[int, _Client] = {}
        self.lock = threading.Lock()
        self.loop: Optional[asyncio.AbstractEventLoop] = None
        self.humans_ready = threading.Event()
        self.finished = threading.Event()
        self.run_error: Optional[str] = None

    # -- client bookkeeping (called from socket tasks) ----------------------

    def attach(self, client: _Client) -> None:
        with self.lock:
            self.clients[client.id] = client

    def detach(self, client: _Client) -> None:
        with self.lock:
            self.clients.pop(client.id, None)
            if client.role == "human" and self.human_slots.get(client.agent_id) == client.id:
                self.human_slots[client.agent_id] = None

    def try_claim_slot(self, client: _Client, agent_id: int) -> Optional[str]:
        """Assign a human slot; returns an error string if unavailable."""
        with self.lock:
            if agent_id not in self.human_slots:
                return f"agent {agent_id} is not a human-controlled slot"
            if self.human_slots[agent_id] is not None:
                return f"agent {agent_id} is already controlled by another client"
            self.human_slots[agent_id] = client.id
            client.role = "human"
            client.agent_id = agent_id
            if all(owner is not None for owner in self.human_slots.values()):
                self.humans_ready.set()
            return None

    # -- broadcasting (called from the engine thread) ------------------------

    def _enqueue(self, client: _Client, message: dict) -> None:
        if (
            client.role == "spectator"
            and message.get("type") == "frame"
            and client.queue.qsize() >= SPECTATOR_QUEUE_LIMIT
        ):
            return  # slow spectator: drop frames rather than stall the run
        client.queue.put_nowait(message)

    def broadcast(self, message: dict) -> None:
        if self.loop is None:
            return
        with self.lock:
            targets = [c for c in self.clients.values() if c.role is not None]
        for client in targets:
            self.loop.call_soon_threadsafe(self._enqueue, client, message)

    def send(self, client: _Client, message: dict) -> None:
        """Queue a message for one client (from any thread context)."""
        client.queue.put_nowait(message)


def _human_slot_ids(config: ExperimentConfig) -> set[int]:
    return {i for i, kind in enumerate(config.model_kinds()) if kind == "human"}


_FALLBACK_PAGE = """<!doctype html>
<html><head><title>magrid session</title></head>
<body><h1>magrid session server</h1>
<p>No web UI bundle was found. Connect a client to <code>/session</code>
(WebSocket) or fetch the finished run at <code>/replay</code>.</p>
</body></html>"""


def build_app(
    config: ExperimentConfig,
    *,
    timeout_ms: int = 10_000,
    wait_for_human: bool = True,
    wait_timeout_s: Optional[float] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    """Assemble the session app; the episode loop starts on app startup."""
    config.validate()
    human_slots = _human_slot_ids(config)
    if not human_slots:
        from .errors import ConfigError

        raise ConfigError("serve needs at least one human agent slot")
    if config.record_path is None:
        config.record_path = str(
            Path(tempfile.mkdtemp(prefix="magrid_")) / "session_replay.jsonl"
        )

    from .runner import build_header

    header = build_header(config)
    _, probe_agents, _ = build_env(config, split_seed(config.seed, 0))
    action_names = probe_agents[0].action_spec.actions

    hub = SessionHub(header, action_names, human_slots)
    source = HumanActionSource(timeout_s=timeout_ms / 1000.0)
    for slot in human_slots:
        source.register(slot)  # accept submissions even before the loop starts

    def on_await(agent_id: int, deadline_unix: float) -> None:
        remaining_ms = max(0, int((deadline_unix - time.time()) * 1000))
        hub.broadcast({"type": "await_action", "agent_id": agent_id, "deadline_ms": remaining_ms})

    source.add_await_listener(on_await)

    def engine() -> None:
        try:
            if wait_for_human:
                hub.humans_ready.wait(timeout=wait_timeout_s)
            run_experiment(
                config,
                human_source=source,
                on_frame=lambda frame: hub.broadcast({"type": "frame", "frame": frame.to_obj()}),
                on_epoch=lambda m: hub.broadcast({"type": "epoch_end", "metrics": asdict(m)}),
            )
        except Exception as e:  # surface engine failures to clients and tests
            log.exception("session run failed")
            hub.run_error = str(e)
            hub.broadcast({"type": "error", "message": f"run failed: {e}"})
        finally:
            hub.finished.set()
            hub.broadcast({"type": "run_end"})

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        hub.loop = asyncio.get_running_loop()
        thread = threading.Thread(target=engine, name="magrid-engine", daemon=True)
        app.state.engine_thread = thread
        thread.start()
        yield

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub
    app.state.source = source
    app.state.config = config

    async def _handle_message(client: _Client, msg) -> None:
        if not isinstance(msg, dict) or "type" not in msg:
            hub.send(client, {"type": "error", "message": "messages need a 'type' field"})
            return
        kind = msg["type"]
        if kind == "join":
            role = msg.get("role", "spectator")
            if role == "human":
                agent_id = msg.get("agent_id")
                err = None
                if not isinstance(agent_id, int):
                    err = "human join needs an integer agent_id"
                else:
                    err = hub.try_claim_slot(client, agent_id)
                if err:
                    hub.send(client, {"type": "error", "message": err})
                    return
            elif role == "spectator":
                client.role = "spectator"
            else:
                hub.send(client, {"type": "error", "message": f"unknown role {role!r}"})
                return
            hub.send(client, {
                "type": "joined",
                "role": client.role,
                "agent_id": client.agent_id,
                "header": hub.header.to_obj(),
            })
        elif kind == "action":
            agent_id = msg.get("agent_id")
            name = msg.get("action")
            if client.role != "human" or agent_id != client.agent_id:
                hub.send(client, {"type": "error",
                                  "message": f"you do not control agent {agent_id}"})
            elif name not in hub.action_names:
                hub.send(client, {"type": "error", "message": f"unknown action {name!r}"})
            else:
                source.submit(agent_id, hub.action_names.index(name))
        elif kind == "ping":
            hub.send(client, {"type": "pong"})
        else:
            hub.send(client, {"type": "error", "message": f"unknown message type {kind!r}"})

    @app.websocket("/session")
    async def session(ws: WebSocket) -> None:
        await ws.accept()
        client = _Client()
        hub.attach(client)

        async def sender() -> None:
            while True:
                message = await client.queue.get()
                await ws.send_json(message)

        send_task = asyncio.create_task(sender())
        try:
            while True:
                try:
                    msg = await ws.receive_json()
                except ValueError:
                    hub.send(client, {"type": "error", "message": "not valid JSON"})
                    continue
                await _handle_message(client, msg)
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            hub.detach(client)
            if client.role == "human" and client.agent_id is not None:
                source.clear(client.agent_id)

    @app.get("/replay")
    async def replay() -> FileResponse:
        if not hub.finished.is_set():
            return JSONResponse({"error": "run still in progress"}, status_code=409)
        path = Path(config.record_path)
        if not path.is_file():
            return JSONResponse({"error": "no replay was recorded"}, status_code=404)
        return FileResponse(path, media_type="application/x-ndjson", filename="replay.jsonl")

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/")
        async def index() -> HTMLResponse:
            return HTMLResponse(_FALLBACK_PAGE)

    return app


def serve(
    config: ExperimentConfig,
    port: int = 8765,
    host: str = "127.0.0.1",
    *,
    timeout_ms: int = 10_000,
    wait_for_human: bool = True,
    ui_dir: Optional[str] = None,
) -> None:
    """Run the interactive session server (blocking)."""
    import uvicorn

    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if bundled.is_dir():
            ui_dir = str(bundled)
    app = build_app(
        config, timeout_ms=timeout_ms, wait_for_human=wait_for_human, ui_dir=ui_dir
    )
    print(f"session server on http://{host}:{port}/  (WebSocket at /session)")
    uvicorn.run(app, host=host, port=port, log_level="warning")
