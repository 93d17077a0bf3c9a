"""Cleanup: a sequential social dilemma.

A river on the left accumulates dirt; apples grow in the orchard on the
right only while the river is clean enough. Cleaning pays nothing
directly, so the group needs cleaners it cannot individually reward.

The map is a glyph grid: ``#`` wall, ``~`` river, ``,`` orchard, ``P``
agent spawn (empty ground), ``.`` empty. Apple growth couples linearly
to pollution: p = p_max * max(0, 1 - pollution / threshold), applied
independently per empty orchard cell per turn, using the pollution
fraction as of this turn (after dirt accumulation).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..agents import ActionSpec, Agent
from ..dynamics import DynamicsSet, WorldChange
from ..errors import ConfigError, MapParseError
from ..observations import EGOCENTRIC, MULTI_HOT, ObservationSpec
from ..rng import draw_index
from ..world import (
    Coord,
    EntityInstance,
    EntityKind,
    Facing,
    GridWorld,
    Layer,
    Vocabulary,
)

ACTIONS = ("up", "down", "left", "right", "clean", "noop")

GLYPHS = {"#", "~", ",", "P", "."}

# Default 11x16 layout: river band (width 3) on the left, orchard band
# (width 4) on the right, agent spawns in the open middle.
DEFAULT_MAP = "\n".join([
    "################",
    "#~~~.......,,,,#",
    "#~~~.P...P.,,,,#",
    "#~~~.......,,,,#",
    "#~~~.P...P.,,,,#",
    "#~~~.......,,,,#",
    "#~~~.P...P.,,,,#",
    "#~~~.......,,,,#",
    "#~~~.P...P.,,,,#",
    "#~~~.......,,,,#",
    "################",
])


@dataclass
class CleanupConfig:
    map: str = DEFAULT_MAP
    n_agents: int = 2
    dirt_prob: float = 0.5
    p_max: float = 0.05
    pollution_threshold: float = 0.5
    beam_range: int = 3
    apple_reward: float = 1.0
    obs_radius: int = 2

    def validate(self) -> None:
        if self.n_agents < 1:
            raise ConfigError(f"n_agents must be >= 1, got {self.n_agents}")
        if not 0.0 <= self.dirt_prob <= 1.0:
            raise ConfigError(f"dirt_prob must be in [0,1], got {self.dirt_prob}")
        if not 0.0 <= self.p_max <= 1.0:
            raise ConfigError(f"p_max must be in [0,1], got {self.p_max}")
        if not 0.0 < self.pollution_threshold <= 1.0:
            raise ConfigError(
                f"pollution_threshold must be in (0,1], got {self.pollution_threshold}"
            )
        if self.beam_range < 1:
            raise ConfigError(f"beam_range must be >= 1, got {self.beam_range}")
        if self.obs_radius < 0:
            raise ConfigError(f"obs_radius must be >= 0, got {self.obs_radius}")


@dataclass
class CleanupState:
    """River bookkeeping: the fixed river cell set and a dirt counter kept
    in lockstep with the grid (checkable by recomputing from the world)."""

    river_cells: tuple[Coord, ...]
    dirt_count: int = 0

    @property
    def pollution_fraction(self) -> float:
        return self.dirt_count / len(self.river_cells)

    def recompute_dirt(self, world: GridWorld) -> int:
        dirt = world.vocab.code_of("dirt")
        return sum(1 for c in self.river_cells if int(world.ground[c.row, c.col]) == dirt)


def make_vocabulary(config: CleanupConfig) -> Vocabulary:
    return Vocabulary([
        EntityKind(0, "empty", ".", Layer.GROUND),
        EntityKind(1, "wall", "#", Layer.GROUND, passable=False),
        EntityKind(2, "river", "~", Layer.GROUND),
        EntityKind(3, "dirt", "x", Layer.GROUND),
        EntityKind(4, "orchard", ",", Layer.GROUND),
        EntityKind(5, "apple", "o", Layer.GROUND,
                   contact_reward=config.apple_reward, consumed_on_contact=True,
                   leaves_behind=4),
        EntityKind(6, "vacant", "_", Layer.ACTOR),
        EntityKind(7, "agent", "A", Layer.ACTOR),
        EntityKind(8, "agent_other", "B", Layer.ACTOR),
    ])


def parse_layout(text: str) -> tuple[list[str], list[Coord], list[Coord], list[Coord]]:
    """Rows plus (river, orchard, spawn) coordinate lists, row-major.

    Raises MapParseError naming the (row, col) of the first bad glyph or
    ragged row.
    """
    rows = [line for line in text.splitlines() if line != ""]
    if not rows:
        raise MapParseError("empty map", 0, 0)
    width = len(rows[0])
    river, orchard, spawns = [], [], []
    for r, line in enumerate(rows):
        if len(line) != width:
            raise MapParseError(f"ragged row (expected width {width})", r, len(line))
        for c, glyph in enumerate(line):
            if glyph not in GLYPHS:
                raise MapParseError(f"unknown glyph {glyph!r}", r, c)
            if glyph == "~":
                river.append(Coord(r, c))
            elif glyph == ",":
                orchard.append(Coord(r, c))
            elif glyph == "P":
                spawns.append(Coord(r, c))
    return rows, river, orchard, spawns


class CleanupDynamics:
    """The pollution-coupled entity rule, in fixed order each turn:

    1. one Bernoulli(dirt_prob) draw; on success one uniformly random
       clean river cell becomes dirt;
    2. pollution recomputed from the grid (so this turn's spawns see this
       turn's dirt);
    3. one Bernoulli draw per empty orchard cell, row-major, spawning
       apples with the pollution-coupled probability.
    """

    def __init__(self, config: CleanupConfig, state: CleanupState, orchard_cells: list[Coord]):
        self.config = config
        self.state = state
        self.orchard_cells = list(orchard_cells)

    def __call__(self, world: GridWorld) -> list[WorldChange]:
        return cleanup_entity_step(world, self.config, self.state, self.orchard_cells)


def apple_spawn_probability(pollution_fraction: float, config: CleanupConfig) -> float:
    """Per-cell apple probability: p_max at zero pollution, linearly down
    to zero at the pollution threshold."""
    if not 0.0 <= pollution_fraction <= 1.0:
        raise ConfigError(f"pollution fraction {pollution_fraction} outside [0,1]")
    return config.p_max * max(0.0, 1.0 - pollution_fraction / config.pollution_threshold)


def cleanup_entity_step(
    world: GridWorld,
    config: CleanupConfig,
    state: CleanupState,
    orchard_cells: list[Coord],
) -> list[WorldChange]:
    vocab = world.vocab
    river = vocab.code_of("river")
    dirt = vocab.code_of("dirt")
    orchard = vocab.code_of("orchard")
    apple = vocab.code_of("apple")
    changes: list[WorldChange] = []

    if float(world.rng.random()) < config.dirt_prob:
        clean = [c for c in state.river_cells if int(world.ground[c.row, c.col]) == river]
        if clean:
            at = clean[draw_index(world.rng, len(clean))]
            world.add(at, Layer.GROUND, EntityInstance(dirt))
            state.dirt_count += 1
            changes.append(WorldChange(at, Layer.GROUND, river, dirt))

    fraction = state.recompute_dirt(world) / len(state.river_cells)
    p = apple_spawn_probability(fraction, config)
    empty_orchard = [c for c in orchard_cells if int(world.ground[c.row, c.col]) == orchard]
    if empty_orchard:
        draws = world.rng.random(len(empty_orchard))
        for at, u in zip(empty_orchard, draws):
            if float(u) < p:
                world.add(at, Layer.GROUND, EntityInstance(apple))
                changes.append(WorldChange(at, Layer.GROUND, orchard, apple))
    return changes


def fire_clean_beam(world: GridWorld, agent: Agent, config: CleanupConfig) -> int:
    """Scan up to beam_range cells along the agent's facing; the first dirt
    becomes clean river. Walls and the world edge stop the beam; agents do
    not. Returns the number of cells cleaned (0 or 1)."""
    vocab = world.vocab
    dirt = vocab.code_of("dirt")
    river = vocab.code_of("river")
    d = agent.facing.delta
    for step in range(1, config.beam_range + 1):
        at = Coord(agent.pos.row + d.row * step, agent.pos.col + d.col * step)
        if not world.in_bounds(at):
            return 0
        code = int(world.ground[at.row, at.col])
        if not vocab[code].passable:
            return 0
        if code == dirt:
            world.add(at, Layer.GROUND, EntityInstance(river))
            return 1
    return 0


def build_cleanup(
    config: CleanupConfig, seed: int
) -> tuple[GridWorld, list[Agent], DynamicsSet]:
    """World from the glyph layout, agents on spawn cells (row-major),
    and the dirt/apple dynamics rule."""
    config.validate()
    rows, river_cells, orchard_cells, spawn_cells = parse_layout(config.map)
    if not river_cells:
        raise ConfigError("map has no river cells")
    if not orchard_cells:
        raise ConfigError("map has no orchard cells")
    if config.n_agents > len(spawn_cells):
        raise ConfigError(
            f"{config.n_agents} agents but only {len(spawn_cells)} spawn cells"
        )
    vocab = make_vocabulary(config)
    world = GridWorld(len(rows), len(rows[0]), vocab, seed=seed)
    code_for = {
        "#": vocab.code_of("wall"),
        "~": vocab.code_of("river"),
        ",": vocab.code_of("orchard"),
        "P": vocab.code_of("empty"),
        ".": vocab.code_of("empty"),
    }
    for r, line in enumerate(rows):
        for c, glyph in enumerate(line):
            world.ground[r, c] = code_for[glyph]

    state = CleanupState(river_cells=tuple(river_cells))
    obs_spec = ObservationSpec(vocab, EGOCENTRIC, config.obs_radius, MULTI_HOT)

    def clean_handler(w: GridWorld, agent: Agent) -> float:
        cleaned = fire_clean_beam(w, agent, config)
        state.dirt_count -= cleaned
        return 0.0

    action_spec = ActionSpec(ACTIONS, bump_penalty=0.0, clean_handler=clean_handler)
    agent_code = vocab.code_of("agent")
    agents = []
    for i in range(config.n_agents):
        at = spawn_cells[i]
        world.add(at, Layer.ACTOR, EntityInstance(agent_code, i))
        agents.append(Agent(i, at, Facing.N, obs_spec, action_spec))

    dynamics = DynamicsSet([CleanupDynamics(config, state, orchard_cells)])
    return world, agents, dynamics
