"""Observation specifications and encoders.

An agent perceives either the whole grid (Full) or a square egocentric
window of radius ``r`` centered on itself. Two encodings ship:

* multi-hot -- a binary ``(H, W, V)`` array over the entity vocabulary.
  Per cell exactly one GROUND bit is set and at most one ACTOR bit
  (the observer encodes as ``self_code``, any other agent as
  ``other_agent_code``; vacant actor slots set no bit). Cells outside
  the grid encode as the wall code, which keeps the window shape fixed.
* ascii -- one glyph string per row, with agents drawn over ground
  (lossy by design: ground under an actor is hidden).

Observations may carry an optional flat auxiliary vector (``aux``) for
agent-internal state; neither shipped environment populates it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, EncodingError
from .world import Coord, GridWorld, Vocabulary

FULL = "full"
EGOCENTRIC = "egocentric"
MULTI_HOT = "multi_hot"
ASCII = "ascii"


@dataclass(frozen=True)
class ObservationSpec:
    """What slice of the world an agent perceives and in what encoding.

    Codes left at -1 resolve by conventional kind name: ``agent`` for
    self, ``agent_other`` for other agents, ``wall`` for the padding that
    fills out-of-bounds cells in egocentric windows.
    """

    vocab: Vocabulary
    mode: str = EGOCENTRIC
    radius: int = 2
    encoding: str = MULTI_HOT
    self_code: int = -1
    other_agent_code: int = -1
    padding_code: int = -1

    def __post_init__(self) -> None:
        if self.mode not in (FULL, EGOCENTRIC):
            raise ConfigError(f"unknown observation mode {self.mode!r}")
        if self.encoding not in (MULTI_HOT, ASCII):
            raise ConfigError(f"unknown observation encoding {self.encoding!r}")
        if self.mode == EGOCENTRIC and self.radius < 0:
            raise ConfigError(f"radius must be >= 0, got {self.radius}")
        for label, name in (("self_code", "agent"),
                            ("other_agent_code", "agent_other"),
                            ("padding_code", "wall")):
            if getattr(self, label) == -1:
                try:
                    object.__setattr__(self, label, self.vocab.code_of(name))
                except KeyError:
                    raise ConfigError(
                        f"{label} not given and vocabulary has no {name!r} kind"
                    ) from None
        v = len(self.vocab)
        for label in ("self_code", "other_agent_code", "padding_code"):
            code = getattr(self, label)
            if not 0 <= code < v:
                raise ConfigError(f"{label} {code} not in vocabulary of size {v}")
        if self.self_code == self.other_agent_code:
            raise ConfigError("self_code and other_agent_code must differ")

    def window_shape(self, world_h: int, world_w: int) -> tuple[int, int]:
        if self.mode == FULL:
            return world_h, world_w
        side = 2 * self.radius + 1
        return side, side


@dataclass(frozen=True, eq=False)
class Observation:
    """One agent's view for one turn: a multi-hot grid or ascii lines."""

    grid: Optional[np.ndarray] = None   # (H, W, V) float32 of 0/1
    lines: Optional[tuple[str, ...]] = None
    aux: Optional[np.ndarray] = None

    def vector(self) -> np.ndarray:
        """Flat float64 view for numeric models (multi-hot only)."""
        if self.grid is None:
            raise EncodingError("ascii observations have no numeric vector form")
        flat = self.grid.reshape(-1).astype(np.float64)
        if self.aux is not None:
            flat = np.concatenate([flat, self.aux.astype(np.float64)])
        return flat

    def key(self) -> bytes:
        """Canonical digest of the observation, used as a state key."""
        h = hashlib.blake2b(digest_size=16)
        if self.grid is not None:
            h.update(np.asarray(self.grid.shape, dtype=np.int64).tobytes())
            h.update(self.grid.astype(np.float32).tobytes())
        if self.lines is not None:
            h.update("\n".join(self.lines).encode("utf-8"))
        if self.aux is not None:
            h.update(self.aux.astype(np.float64).tobytes())
        return h.digest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Observation):
            return NotImplemented
        return self.key() == other.key()


def _window_codes(
    world: GridWorld, center: Coord, spec: ObservationSpec
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ground codes, actor codes, and actor ids for the observed window.

    Out-of-bounds cells hold ``padding_code`` ground, empty actor, id -1.
    """
    if spec.mode == FULL:
        return world.ground.copy(), world.actor.copy(), world.actor_id.copy()
    r = spec.radius
    side = 2 * r + 1
    ground = np.full((side, side), spec.padding_code, dtype=np.int16)
    actor = np.full((side, side), world.vocab.actor_empty, dtype=np.int16)
    ids = np.full((side, side), -1, dtype=np.int32)
    top, left = center.row - r, center.col - r
    src_r0, src_c0 = max(0, top), max(0, left)
    src_r1 = min(world.height, top + side)
    src_c1 = min(world.width, left + side)
    if src_r0 < src_r1 and src_c0 < src_c1:
        dst_r0, dst_c0 = src_r0 - top, src_c0 - left
        dst_r1, dst_c1 = src_r1 - top, src_c1 - left
        ground[dst_r0:dst_r1, dst_c0:dst_c1] = world.ground[src_r0:src_r1, src_c0:src_c1]
        actor[dst_r0:dst_r1, dst_c0:dst_c1] = world.actor[src_r0:src_r1, src_c0:src_c1]
        ids[dst_r0:dst_r1, dst_c0:dst_c1] = world.actor_id[src_r0:src_r1, src_c0:src_c1]
    return ground, actor, ids


def encode_multi_hot(
    world: GridWorld, center: Coord, observer_id: int, spec: ObservationSpec
) -> np.ndarray:
    """Binary (H, W, V) window; the observer's cell carries ``self_code``."""
    ground, actor, ids = _window_codes(world, center, spec)
    h, w = ground.shape
    v = len(spec.vocab)
    out = np.zeros((h, w, v), dtype=np.float32)
    rows, cols = np.indices((h, w))
    out[rows.ravel(), cols.ravel(), ground.ravel()] = 1.0
    occupied = ids >= 0
    own = occupied & (ids == observer_id)
    other = occupied & (ids != observer_id)
    out[rows[own], cols[own], spec.self_code] = 1.0
    out[rows[other], cols[other], spec.other_agent_code] = 1.0
    return out


def encode_ascii(
    ground: np.ndarray,
    actor_ids: np.ndarray,
    observer_id: int,
    spec: ObservationSpec,
) -> list[str]:
    """Glyph rows for a window of ground codes with agents drawn on top."""
    vocab = spec.vocab
    v = len(vocab)
    lines = []
    for r in range(ground.shape[0]):
        row = []
        for c in range(ground.shape[1]):
            aid = int(actor_ids[r, c])
            if aid >= 0:
                code = spec.self_code if aid == observer_id else spec.other_agent_code
            else:
                code = int(ground[r, c])
            if not 0 <= code < v:
                raise EncodingError(f"code {code} has no glyph in vocabulary of size {v}")
            row.append(vocab[code].glyph)
        lines.append("".join(row))
    return lines


def observe(world: GridWorld, center: Coord, observer_id: int, spec: ObservationSpec) -> Observation:
    """Encode the window around ``center`` for agent ``observer_id``. Pure."""
    if spec.encoding == MULTI_HOT:
        return Observation(grid=encode_multi_hot(world, center, observer_id, spec))
    ground, _, ids = _window_codes(world, center, spec)
    return Observation(lines=tuple(encode_ascii(ground, ids, observer_id, spec)))
