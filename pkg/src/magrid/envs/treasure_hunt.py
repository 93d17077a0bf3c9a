"""Treasure Hunt: the tutorial environment.

A wall-bordered square where gems occasionally appear on empty interior
cells; agents compete to reach them first. Rewards: +gem_reward on
collecting a gem, bump_penalty on a blocked move, 0 otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..agents import ActionSpec, Agent
from ..dynamics import DynamicsSet, SpawnRule
from ..errors import ConfigError
from ..observations import EGOCENTRIC, MULTI_HOT, ObservationSpec
from ..world import (
    EntityInstance,
    EntityKind,
    Facing,
    GridWorld,
    Layer,
    Region,
    Vocabulary,
)

ACTIONS = ("up", "down", "left", "right", "noop")


@dataclass
class TreasureHuntConfig:
    size: int = 7  # full board side, wall border included
    n_agents: int = 1
    gem_prob: float = 0.2
    gem_reward: float = 10.0
    bump_penalty: float = -0.1
    obs_radius: int = 2

    def validate(self) -> None:
        if self.size < 3:
            raise ConfigError(f"size must be >= 3, got {self.size}")
        if self.n_agents < 1:
            raise ConfigError(f"n_agents must be >= 1, got {self.n_agents}")
        interior = (self.size - 2) ** 2
        if interior <= self.n_agents:
            raise ConfigError(
                f"{self.n_agents} agents do not fit the {interior}-cell interior"
            )
        if not 0.0 <= self.gem_prob <= 1.0:
            raise ConfigError(f"gem_prob must be in [0,1], got {self.gem_prob}")
        if self.obs_radius < 0:
            raise ConfigError(f"obs_radius must be >= 0, got {self.obs_radius}")


def make_vocabulary(config: TreasureHuntConfig) -> Vocabulary:
    return Vocabulary([
        EntityKind(0, "empty", ".", Layer.GROUND),
        EntityKind(1, "wall", "#", Layer.GROUND, passable=False),
        EntityKind(2, "gem", "*", Layer.GROUND,
                   contact_reward=config.gem_reward, consumed_on_contact=True),
        EntityKind(3, "vacant", "_", Layer.ACTOR),
        EntityKind(4, "agent", "A", Layer.ACTOR),
        EntityKind(5, "agent_other", "B", Layer.ACTOR),
    ])


def build_treasure_hunt(
    config: TreasureHuntConfig, seed: int
) -> tuple[GridWorld, list[Agent], DynamicsSet]:
    """World, agents on distinct random interior cells, and the gem spawner."""
    config.validate()
    vocab = make_vocabulary(config)
    world = GridWorld(config.size, config.size, vocab, seed=seed)
    wall = vocab.code_of("wall")
    world.ground[0, :] = wall
    world.ground[-1, :] = wall
    world.ground[:, 0] = wall
    world.ground[:, -1] = wall

    interior = Region(1, 1, config.size - 2, config.size - 2)
    obs_spec = ObservationSpec(vocab, EGOCENTRIC, config.obs_radius, MULTI_HOT)
    action_spec = ActionSpec(ACTIONS, bump_penalty=config.bump_penalty)
    agent_code = vocab.code_of("agent")

    agents = []
    for i in range(config.n_agents):
        at = world.random_empty(Layer.ACTOR, interior)
        if at is None:
            raise ConfigError("no empty interior cell left for agent placement")
        world.add(at, Layer.ACTOR, EntityInstance(agent_code, i))
        agents.append(Agent(i, at, Facing.N, obs_spec, action_spec))

    # One gem at a time keeps the reward sparse: a new gem can appear only
    # after the current one is collected.
    gem = vocab.by_name("gem")
    dynamics = DynamicsSet([
        SpawnRule(gem, config.gem_prob, Layer.GROUND, max_per_turn=1,
                  region=interior, max_on_board=1)
    ])
    return world, agents, dynamics
