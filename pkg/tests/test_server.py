"""Session server protocol: join/frames/awaits over a headless client."""

import json

from starlette.testclient import TestClient

from magrid.envs import TreasureHuntConfig
from magrid.runner import ExperimentConfig
from magrid.server import build_app

ACTIONS = ("up", "down", "left", "right", "noop")


def session_config(**kw):
    defaults = dict(
        env="treasure_hunt",
        env_config=TreasureHuntConfig(size=5, n_agents=2),
        seed=31,
        epochs=2,
        turns_per_epoch=4,
        model=["human", "random"],
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def drain_until(ws, predicate, limit=500):
    """Read messages until one satisfies the predicate; returns all read."""
    seen = []
    for _ in range(limit):
        msg = ws.receive_json()
        seen.append(msg)
        if predicate(msg):
            return seen
    raise AssertionError(f"predicate never satisfied; last: {seen[-3:]}")


class TestProtocol:
    def test_full_human_session(self, tmp_path):
        cfg = session_config(record_path=str(tmp_path / "session.jsonl"))
        app = build_app(cfg, timeout_ms=5_000, wait_for_human=True)
        script = ["up", "left", "down", "right", "up", "left", "down", "right"]
        submitted = []

        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                ws.send_json({"type": "join", "role": "human", "agent_id": 0})
                joined = ws.receive_json()
                assert joined["type"] == "joined"
                assert joined["role"] == "human" and joined["agent_id"] == 0
                header = joined["header"]
                assert header["n"] == 2 and header["env"] == "treasure_hunt"

                frames = []
                while True:
                    msg = ws.receive_json()
                    if msg["type"] == "await_action":
                        assert msg["agent_id"] == 0
                        assert msg["deadline_ms"] > 0
                        action = script[len(submitted) % len(script)]
                        ws.send_json({"type": "action", "agent_id": 0, "action": action})
                        submitted.append(action)
                    elif msg["type"] == "frame":
                        frames.append(msg["frame"])
                    elif msg["type"] == "run_end":
                        break
                    elif msg["type"] == "error":
                        raise AssertionError(msg)

            # one action per await window, one await per turn
            assert len(submitted) == cfg.epochs * cfg.turns_per_epoch
            # frames in strictly increasing (epoch, turn) order, no gaps
            keys = [(f["e"], f["t"]) for f in frames]
            expected = [(e, t) for e in range(cfg.epochs)
                        for t in range(cfg.turns_per_epoch)]
            assert keys == expected

            # server-side replay reflects each submitted action on its turn
            reply = client.get("/replay")
            assert reply.status_code == 200
            lines = reply.text.splitlines()
            recorded = [json.loads(line) for line in lines[1:]]
            for frame, action in zip(recorded, submitted):
                acted = dict(map(tuple, frame["act"]))
                assert acted[0] == action

    def test_slot_rejection_for_second_human(self, tmp_path):
        cfg = session_config(record_path=str(tmp_path / "s.jsonl"))
        app = build_app(cfg, timeout_ms=100, wait_for_human=True)
        with TestClient(app) as client:
            with client.websocket_connect("/session") as first:
                first.send_json({"type": "join", "role": "human", "agent_id": 0})
                assert first.receive_json()["type"] == "joined"
                with client.websocket_connect("/session") as second:
                    second.send_json({"type": "join", "role": "human", "agent_id": 0})
                    msg = second.receive_json()
                    assert msg["type"] == "error"
                    assert "already controlled" in msg["message"]

    def test_unknown_message_type_keeps_connection(self, tmp_path):
        cfg = session_config(record_path=str(tmp_path / "s.jsonl"))
        app = build_app(cfg, timeout_ms=100, wait_for_human=True)
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                ws.send_json({"type": "dance"})
                assert ws.receive_json()["type"] == "error"
                ws.send_json({"type": "ping"})
                assert ws.receive_json()["type"] == "pong"

    def test_action_for_uncontrolled_agent_rejected(self, tmp_path):
        cfg = session_config(record_path=str(tmp_path / "s.jsonl"))
        app = build_app(cfg, timeout_ms=100, wait_for_human=True)
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                ws.send_json({"type": "join", "role": "spectator"})
                assert ws.receive_json()["type"] == "joined"
                ws.send_json({"type": "action", "agent_id": 0, "action": "up"})
                msg = ws.receive_json()
                assert msg["type"] == "error"

    def test_replay_endpoint_while_running_is_409(self, tmp_path):
        cfg = session_config(record_path=str(tmp_path / "s.jsonl"))
        # wait_for_human keeps the run pending; nobody joins
        app = build_app(cfg, timeout_ms=100, wait_for_human=True)
        with TestClient(app) as client:
            assert client.get("/replay").status_code == 409

    def test_unattended_run_completes_on_timeouts(self, tmp_path):
        # no client ever joins: every human turn resolves to noop at its
        # deadline and the run still finishes
        cfg = session_config(
            epochs=1, turns_per_epoch=3, record_path=str(tmp_path / "s.jsonl")
        )
        app = build_app(cfg, timeout_ms=30, wait_for_human=False)
        with TestClient(app) as client:
            hub = app.state.hub
            assert hub.finished.wait(timeout=10.0)
            assert hub.run_error is None
            reply = client.get("/replay")
            assert reply.status_code == 200
            frames = [json.loads(l) for l in reply.text.splitlines()[1:]]
            assert len(frames) == 3
            for frame in frames:
                assert dict(map(tuple, frame["act"]))[0] == "noop"

    def test_index_serves_fallback_page(self, tmp_path):
        cfg = session_config(record_path=str(tmp_path / "s.jsonl"))
        app = build_app(cfg, timeout_ms=100, wait_for_human=True)
        with TestClient(app) as client:
            page = client.get("/")
            assert page.status_code == 200
            assert "magrid" in page.text
