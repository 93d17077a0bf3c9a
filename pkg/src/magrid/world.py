"""The layered grid substrate: entity vocabulary, two-layer world map, and
placement/movement/query helpers.

A world is a bounded ``height x width`` board with exactly two layers:
GROUND holds terrain and objects (walls, gems, apples, dirt), ACTOR holds
agents. Every slot always holds exactly one entity instance; "nothing
here" is an explicit empty kind per layer, so occupancy is a checkable
invariant rather than a nullability convention. Coordinates are
``(row, col)`` with row 0 at the top.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .errors import BoundsError, ConfigError, ContractError, VocabularyError
from .rng import draw_index, make_rng

GROUND_EMPTY = "empty"
ACTOR_EMPTY = "vacant"


class Coord(NamedTuple):
    row: int
    col: int


class Layer(IntEnum):
    GROUND = 0
    ACTOR = 1


class Facing(str, Enum):
    N = "N"
    S = "S"
    E = "E"
    W = "W"

    @property
    def delta(self) -> Coord:
        return _FACING_DELTAS[self]


_FACING_DELTAS = {
    Facing.N: Coord(-1, 0),
    Facing.S: Coord(1, 0),
    Facing.E: Coord(0, 1),
    Facing.W: Coord(0, -1),
}


class MoveResult(Enum):
    MOVED = "moved"
    BLOCKED_BY_WALL = "blocked_by_wall"
    BLOCKED_BY_ACTOR = "blocked_by_actor"
    OUT_OF_BOUNDS = "out_of_bounds"


@dataclass(frozen=True, slots=True)
class EntityKind:
    """One vocabulary entry: what a world object is and how it behaves.

    ``contact_reward`` accrues to an agent entering the cell only when
    ``consumed_on_contact`` is set; consumption replaces the entity with
    ``leaves_behind`` (a code) or the layer's empty kind when None.
    """

    code: int
    name: str
    glyph: str
    layer: Layer = Layer.GROUND
    passable: bool = True
    contact_reward: float = 0.0
    consumed_on_contact: bool = False
    leaves_behind: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.glyph) != 1:
            raise VocabularyError(f"kind {self.name!r}: glyph must be a single character")


@dataclass(frozen=True, slots=True)
class EntityInstance:
    """The occupant of one slot: a kind code plus, for agents, their id."""

    code: int
    agent_id: Optional[int] = None


class Vocabulary:
    """An ordered entity-kind list with contiguous codes starting at 0.

    Every vocabulary must contain a GROUND-empty kind named ``empty`` and
    an ACTOR-empty kind named ``vacant``.
    """

    def __init__(self, kinds: Sequence[EntityKind]):
        self.kinds: tuple[EntityKind, ...] = tuple(kinds)
        for i, kind in enumerate(self.kinds):
            if kind.code != i:
                raise VocabularyError(
                    f"codes must be contiguous from 0: kind {kind.name!r} has code "
                    f"{kind.code} at position {i}"
                )
        names = [k.name for k in self.kinds]
        if len(set(names)) != len(names):
            raise VocabularyError("kind names must be unique")
        self._by_name = {k.name: k for k in self.kinds}
        if GROUND_EMPTY not in self._by_name:
            raise VocabularyError(f"vocabulary must contain a {GROUND_EMPTY!r} ground kind")
        if ACTOR_EMPTY not in self._by_name:
            raise VocabularyError(f"vocabulary must contain a {ACTOR_EMPTY!r} actor kind")
        self.ground_empty = self._by_name[GROUND_EMPTY].code
        self.actor_empty = self._by_name[ACTOR_EMPTY].code

    def __len__(self) -> int:
        return len(self.kinds)

    def __iter__(self) -> Iterator[EntityKind]:
        return iter(self.kinds)

    def __getitem__(self, code: int) -> EntityKind:
        return self.kinds[code]

    def code_of(self, name: str) -> int:
        return self._by_name[name].code

    def by_name(self, name: str) -> EntityKind:
        return self._by_name[name]

    def empty_code(self, layer: Layer) -> int:
        return self.ground_empty if layer == Layer.GROUND else self.actor_empty

    def table(self) -> list[dict]:
        """JSON-ready code -> name -> glyph table (replay header form)."""
        return [
            {"c": k.code, "n": k.name, "g": k.glyph, "l": "G" if k.layer == Layer.GROUND else "A"}
            for k in self.kinds
        ]


class Region(NamedTuple):
    """Inclusive rectangular coordinate range."""

    top: int
    left: int
    bottom: int
    right: int

    def contains(self, at: Coord) -> bool:
        return self.top <= at.row <= self.bottom and self.left <= at.col <= self.right


class GridWorld:
    """Two-layer bounded grid of entity instances plus turn counter and RNG.

    Layers are stored as code arrays (``int16``) with a parallel
    ``actor_id`` array (-1 where no agent), which keeps the per-slot
    occupancy invariant structural and makes observation encoding cheap.
    Mutation is single-threaded: a world is owned by exactly one episode
    loop at a time.
    """

    def __init__(
        self,
        height: int,
        width: int,
        vocab: Vocabulary,
        ground_fill: int | None = None,
        seed: int = 0,
    ):
        if height < 1:
            raise ConfigError(f"height must be >= 1, got {height}")
        if width < 1:
            raise ConfigError(f"width must be >= 1, got {width}")
        self.height = height
        self.width = width
        self.vocab = vocab
        fill = vocab.ground_empty if ground_fill is None else ground_fill
        if not 0 <= fill < len(vocab):
            raise VocabularyError(f"ground fill code {fill} not in vocabulary")
        self.ground = np.full((height, width), fill, dtype=np.int16)
        self.actor = np.full((height, width), vocab.actor_empty, dtype=np.int16)
        self.actor_id = np.full((height, width), -1, dtype=np.int32)
        self.turn = 0
        self.rng = make_rng(seed)

    # -- queries -----------------------------------------------------------

    def in_bounds(self, at: Coord) -> bool:
        return 0 <= at.row < self.height and 0 <= at.col < self.width

    def _check_bounds(self, at: Coord) -> None:
        if not self.in_bounds(at):
            raise BoundsError(
                f"({at.row}, {at.col}) outside {self.height}x{self.width} world"
            )

    def observe(self, at: Coord, layer: Layer) -> EntityInstance:
        """The occupant of one slot, without mutation."""
        self._check_bounds(at)
        if layer == Layer.GROUND:
            return EntityInstance(int(self.ground[at.row, at.col]))
        aid = int(self.actor_id[at.row, at.col])
        return EntityInstance(int(self.actor[at.row, at.col]), aid if aid >= 0 else None)

    def kind_at(self, at: Coord, layer: Layer) -> EntityKind:
        return self.vocab[self.observe(at, layer).code]

    # -- mutation ----------------------------------------------------------

    def add(self, at: Coord, layer: Layer, entity: EntityInstance) -> EntityInstance:
        """Place ``entity`` in the slot; the displaced occupant is returned."""
        self._check_bounds(at)
        prev = self.observe(at, layer)
        if layer == Layer.GROUND:
            self.ground[at.row, at.col] = entity.code
        else:
            self.actor[at.row, at.col] = entity.code
            self.actor_id[at.row, at.col] = -1 if entity.agent_id is None else entity.agent_id
        return prev

    def remove(self, at: Coord, layer: Layer) -> EntityInstance:
        """Clear the slot back to the layer's empty kind; returns the occupant.

        Removing an already-empty slot is a no-op that returns the empty kind.
        """
        return self.add(at, layer, EntityInstance(self.vocab.empty_code(layer)))

    def move_actor(self, src: Coord, dst: Coord) -> MoveResult:
        """Attempt to move the actor at ``src`` to ``dst``.

        Succeeds iff ``dst`` is in bounds, its GROUND kind is passable, and
        its ACTOR slot is empty; on any failure the world is unchanged.
        Precedence of failure results: out-of-bounds, wall, actor.
        """
        self._check_bounds(src)
        mover = self.observe(src, Layer.ACTOR)
        if mover.code == self.vocab.actor_empty:
            raise ContractError(f"move_actor: no actor at ({src.row}, {src.col})")
        if not self.in_bounds(dst):
            return MoveResult.OUT_OF_BOUNDS
        if not self.vocab[int(self.ground[dst.row, dst.col])].passable:
            return MoveResult.BLOCKED_BY_WALL
        if int(self.actor[dst.row, dst.col]) != self.vocab.actor_empty:
            return MoveResult.BLOCKED_BY_ACTOR
        self.actor[dst.row, dst.col] = mover.code
        self.actor_id[dst.row, dst.col] = -1 if mover.agent_id is None else mover.agent_id
        self.actor[src.row, src.col] = self.vocab.actor_empty
        self.actor_id[src.row, src.col] = -1
        return MoveResult.MOVED

    # -- randomness --------------------------------------------------------

    def empty_slots(self, layer: Layer, region: Region | None = None) -> list[Coord]:
        """Row-major list of coordinates whose slot holds the layer's empty kind."""
        codes = self.ground if layer == Layer.GROUND else self.actor
        mask = codes == self.vocab.empty_code(layer)
        if region is not None:
            bounded = np.zeros_like(mask)
            bounded[region.top : region.bottom + 1, region.left : region.right + 1] = True
            mask &= bounded
        rows, cols = np.nonzero(mask)
        return [Coord(int(r), int(c)) for r, c in zip(rows, cols)]

    def random_empty(self, layer: Layer, region: Region | None = None) -> Coord | None:
        """A uniformly random empty slot on the layer, or None if there is none.

        Always consumes exactly one RNG quantum (one double draw), regardless
        of grid contents, so seeded runs stay aligned.
        """
        slots = self.empty_slots(layer, region)
        idx = draw_index(self.rng, len(slots))
        if idx < 0:
            return None
        return slots[idx]

    # -- identity ----------------------------------------------------------

    def content_hash(self) -> bytes:
        """Digest of the board contents (layers, ids, turn); excludes RNG state."""
        h = hashlib.blake2b(digest_size=16)
        h.update(self.ground.tobytes())
        h.update(self.actor.tobytes())
        h.update(self.actor_id.tobytes())
        h.update(self.turn.to_bytes(8, "little"))
        return h.digest()

    def structurally_equal(self, other: "GridWorld") -> bool:
        """Full structural equality, including RNG state."""
        return (
            self.height == other.height
            and self.width == other.width
            and np.array_equal(self.ground, other.ground)
            and np.array_equal(self.actor, other.actor)
            and np.array_equal(self.actor_id, other.actor_id)
            and self.turn == other.turn
            and self.rng.bit_generator.state == other.rng.bit_generator.state
        )

    def ground_glyphs(self) -> list[str]:
        """The GROUND layer as one glyph string per row."""
        return [
            "".join(self.vocab[int(c)].glyph for c in self.ground[r])
            for r in range(self.height)
        ]


def new_world(
    height: int,
    width: int,
    ground_fill: EntityKind,
    vocab: Vocabulary,
    seed: int = 0,
) -> GridWorld:
    """Construct a world with GROUND filled by ``ground_fill`` and an empty
    ACTOR layer, at turn 0."""
    return GridWorld(height, width, vocab, ground_fill=ground_fill.code, seed=seed)
