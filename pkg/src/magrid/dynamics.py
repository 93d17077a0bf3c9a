"""Per-turn entity transitions: the half of the world's transition function
that happens without agents (growth, pollution, random spawn/despawn).

Rules are applied in list order, each drawing only from ``world.rng`` in a
documented sequence, so a seed fully determines every spawn. Each rule
returns an auditable list of WorldChange records; replaying those records
onto a pre-step snapshot reproduces the post-step world exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Union

from .errors import ConfigError
from .rng import draw_index
from .world import Coord, EntityInstance, EntityKind, GridWorld, Layer, Region


@dataclass(frozen=True, slots=True)
class WorldChange:
    """One slot mutation: ``old_code`` replaced by ``new_code`` at ``at``."""

    at: Coord
    layer: Layer
    old_code: int
    new_code: int


@dataclass(frozen=True)
class SpawnRule:
    """Declarative stochastic spawner.

    Each turn: one Bernoulli draw with ``probability_per_turn``; on success,
    up to ``max_per_turn`` entities of ``kind`` are placed on distinct
    uniformly-random empty slots of ``layer`` inside ``region`` (whole grid
    when None). ``max_on_board`` optionally caps how many of the kind may
    exist at once (counted inside the region), keeping entity counts
    bounded and the reward signal sparse where an environment wants that.
    Draw order is fixed: the Bernoulli first (always consumed), then one
    index draw per placement, so the RNG budget is a pure function of the
    rule, the current count, and the number of eligible slots.
    """

    kind: EntityKind
    probability_per_turn: float
    layer: Layer = Layer.GROUND
    max_per_turn: int = 1
    region: Region | None = None
    max_on_board: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability_per_turn <= 1.0:
            raise ConfigError(
                f"probability_per_turn must be in [0,1], got {self.probability_per_turn}"
            )
        if self.max_per_turn < 0:
            raise ConfigError(f"max_per_turn must be >= 0, got {self.max_per_turn}")
        if self.max_on_board is not None and self.max_on_board < 0:
            raise ConfigError(f"max_on_board must be >= 0, got {self.max_on_board}")

    def apply(self, world: GridWorld) -> list[WorldChange]:
        return apply_spawn_rule(world, self)


class DynamicsRule(Protocol):
    """Escape hatch for environment-specific dynamics (e.g. pollution-coupled
    growth): any callable taking the world and returning its change list."""

    def __call__(self, world: GridWorld) -> list[WorldChange]: ...


Rule = Union[SpawnRule, DynamicsRule]


@dataclass
class DynamicsSet:
    """Ordered rule list; application order is list order, for reproducibility."""

    rules: list[Rule] = field(default_factory=list)


def apply_spawn_rule(world: GridWorld, rule: SpawnRule) -> list[WorldChange]:
    """Apply one SpawnRule; returns the (possibly empty) change list."""
    if rule.region is not None:
        if not (world.in_bounds(Coord(rule.region.top, rule.region.left)) and
                world.in_bounds(Coord(rule.region.bottom, rule.region.right))):
            raise ConfigError(f"spawn region {rule.region} out of bounds")
    changes: list[WorldChange] = []
    if float(world.rng.random()) >= rule.probability_per_turn:
        return changes
    budget = rule.max_per_turn
    if rule.max_on_board is not None:
        present = _count_kind(world, rule)
        budget = min(budget, max(0, rule.max_on_board - present))
    empties = world.empty_slots(rule.layer, rule.region)
    empty_code = world.vocab.empty_code(rule.layer)
    for _ in range(min(budget, len(empties))):
        at = empties.pop(draw_index(world.rng, len(empties)))
        world.add(at, rule.layer, EntityInstance(rule.kind.code))
        changes.append(WorldChange(at, rule.layer, empty_code, rule.kind.code))
    return changes


def _count_kind(world: GridWorld, rule: SpawnRule) -> int:
    codes = world.ground if rule.layer == Layer.GROUND else world.actor
    if rule.region is not None:
        r = rule.region
        codes = codes[r.top : r.bottom + 1, r.left : r.right + 1]
    return int((codes == rule.kind.code).sum())


def step_entities(world: GridWorld, dynamics: DynamicsSet) -> list[WorldChange]:
    """Apply every rule once, in list order; concatenated change list."""
    changes: list[WorldChange] = []
    for rule in dynamics.rules:
        if isinstance(rule, SpawnRule):
            changes.extend(apply_spawn_rule(world, rule))
        else:
            changes.extend(rule(world))
    return changes


def replay_changes(world: GridWorld, changes: list[WorldChange]) -> None:
    """Apply a recorded change list to a world snapshot (test/audit helper)."""
    for ch in changes:
        agent_id = None
        world.add(ch.at, ch.layer, EntityInstance(ch.new_code, agent_id))
