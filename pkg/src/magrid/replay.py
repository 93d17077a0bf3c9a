"""Bit-exact trajectory recording, reading, and text rendering.

A replay file is line-delimited JSON, UTF-8: line 1 is the header object
(`v, env, config, vocab, h, w, n`), every following line one frame
(`e, t, g, a, act, r, s`). Ground codes are stored whole per frame (not
as diffs) so any frame renders independently, which frame scrubbing
needs. Frames are recorded after entity dynamics, i.e. each frame shows
the world as a player would see it at the start of the next turn. Reals
serialize with Python's shortest round-trip repr.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .agents import Agent, TurnOutcome
from .errors import RenderError, ReplayFormatError, ReplayVersionError
from .world import GridWorld

FORMAT_VERSION = 1

_JSON_SEP = (",", ":")


@dataclass(frozen=True)
class ReplayHeader:
    """Everything needed to render frames without the engine."""

    env: str
    config: dict
    vocab: list[dict]  # entries {c, n, g, l}
    height: int
    width: int
    n_agents: int
    version: int = FORMAT_VERSION

    def to_obj(self) -> dict:
        return {
            "v": self.version,
            "env": self.env,
            "config": self.config,
            "vocab": self.vocab,
            "h": self.height,
            "w": self.width,
            "n": self.n_agents,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "ReplayHeader":
        return cls(
            env=obj["env"],
            config=obj["config"],
            vocab=obj["vocab"],
            height=obj["h"],
            width=obj["w"],
            n_agents=obj["n"],
            version=obj["v"],
        )


@dataclass(frozen=True)
class FrameRecord:
    """One turn's snapshot: ground codes plus per-agent pose/action/reward."""

    epoch: int
    turn: int
    ground: tuple[int, ...]  # row-major, length h*w
    actors: tuple[tuple[int, int, int, str], ...]  # (agent_id, row, col, facing)
    actions: tuple[tuple[int, str], ...]
    rewards: tuple[tuple[int, float], ...]
    scores: tuple[tuple[int, float], ...]

    def to_obj(self) -> dict:
        return {
            "e": self.epoch,
            "t": self.turn,
            "g": list(self.ground),
            "a": [list(a) for a in self.actors],
            "act": [list(a) for a in self.actions],
            "r": [list(r) for r in self.rewards],
            "s": [list(s) for s in self.scores],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "FrameRecord":
        return cls(
            epoch=obj["e"],
            turn=obj["t"],
            ground=tuple(obj["g"]),
            actors=tuple((a[0], a[1], a[2], a[3]) for a in obj["a"]),
            actions=tuple((a[0], a[1]) for a in obj["act"]),
            rewards=tuple((r[0], r[1]) for r in obj["r"]),
            scores=tuple((s[0], s[1]) for s in obj["s"]),
        )


def record_frame(
    world: GridWorld,
    agents: Sequence[Agent],
    outcomes: Sequence[TurnOutcome],
    epoch: int,
    turn: int,
) -> FrameRecord:
    """Value-semantic snapshot of the world and this turn's outcomes;
    call once per turn, after entity dynamics."""
    by_id = sorted(agents, key=lambda a: a.id)
    out_by_id = {o.agent_id: o for o in outcomes}
    return FrameRecord(
        epoch=epoch,
        turn=turn,
        ground=tuple(int(c) for c in world.ground.reshape(-1)),
        actors=tuple((a.id, a.pos.row, a.pos.col, a.facing.value) for a in by_id),
        actions=tuple(
            (a.id, out_by_id[a.id].action_name) for a in by_id if a.id in out_by_id
        ),
        rewards=tuple(
            (a.id, out_by_id[a.id].transition.reward) for a in by_id if a.id in out_by_id
        ),
        scores=tuple((a.id, a.score) for a in by_id),
    )


class ReplayWriter:
    """Streams header + frames to a line-delimited file as the run goes."""

    def __init__(self, path):
        self._fh: IO[str] = open(path, "w", encoding="utf-8", newline="")
        self._wrote_header = False

    def write_header(self, header: ReplayHeader) -> None:
        self._fh.write(json.dumps(header.to_obj(), separators=_JSON_SEP) + "\n")
        self._wrote_header = True

    def write_frame(self, frame: FrameRecord) -> None:
        assert self._wrote_header, "header must be written first"
        self._fh.write(json.dumps(frame.to_obj(), separators=_JSON_SEP) + "\n")

    def flush(self) -> None:
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "ReplayWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_replay(path, header: ReplayHeader, frames: Iterable[FrameRecord]) -> None:
    with ReplayWriter(path) as w:
        w.write_header(header)
        for frame in frames:
            w.write_frame(frame)


def read_replay(path) -> tuple[ReplayHeader, list[FrameRecord]]:
    """Parse a replay file; raises ReplayFormatError with the 1-based line
    number of the first malformed line, ReplayVersionError on a version
    mismatch."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ReplayFormatError("empty replay file", 1)
    try:
        head_obj = json.loads(lines[0])
        header = ReplayHeader.from_obj(head_obj)
    except ReplayVersionError:
        raise
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ReplayFormatError(f"bad header: {e}", 1) from None
    if header.version != FORMAT_VERSION:
        raise ReplayVersionError(
            f"replay format version {header.version}, this reader supports {FORMAT_VERSION}"
        )
    frames = []
    for i, line in enumerate(lines[1:], start=2):
        try:
            frames.append(FrameRecord.from_obj(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, IndexError) as e:
            raise ReplayFormatError(f"bad frame: {e}", i) from None
    return header, frames


def _glyph_table(header: ReplayHeader) -> tuple[dict[int, str], str]:
    glyphs = {entry["c"]: entry["g"] for entry in header.vocab}
    agent_glyph = None
    for entry in header.vocab:
        if entry["n"] == "agent":
            agent_glyph = entry["g"]
    if agent_glyph is None:
        raise RenderError("vocabulary has no 'agent' kind to draw actors with")
    return glyphs, agent_glyph


def render_ascii(header: ReplayHeader, frame: FrameRecord) -> list[str]:
    """Height lines of width glyphs; actors drawn over ground with the
    vocabulary's agent glyph."""
    h, w = header.height, header.width
    if len(frame.ground) != h * w:
        raise RenderError(
            f"frame has {len(frame.ground)} ground codes, header says {h}x{w}"
        )
    glyphs, agent_glyph = _glyph_table(header)
    rows = []
    for r in range(h):
        row = []
        for c in range(w):
            code = frame.ground[r * w + c]
            if code not in glyphs:
                raise RenderError(f"ground code {code} absent from header vocabulary")
            row.append(glyphs[code])
        rows.append(row)
    for _, r, c, _facing in frame.actors:
        rows[r][c] = agent_glyph
    return ["".join(row) for row in rows]


def render_world(world: GridWorld, agents: Sequence[Agent]) -> list[str]:
    """Render directly from live engine state (the independent route the
    replay path is checked against in tests)."""
    rows = [list(line) for line in world.ground_glyphs()]
    agent_glyph = world.vocab.by_name("agent").glyph
    for a in agents:
        rows[a.pos.row][a.pos.col] = agent_glyph
    return ["".join(row) for row in rows]
