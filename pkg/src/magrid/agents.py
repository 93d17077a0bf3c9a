"""The agent architecture: action specification and the per-agent
state -> action -> reward -> done transition loop.

Movement actions set the agent's facing and attempt a one-cell move;
entering a cell whose ground entity is consumed on contact collects that
entity's reward. Blocked moves cost the environment's bump penalty.
``clean`` delegates to the environment-provided beam handler; ``noop``
does nothing. The next-state observation is captured immediately after
the agent's own action, before other agents act and before entity
dynamics, which keeps single-agent TD targets well-defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ConfigError, ContractError
from .observations import Observation, ObservationSpec, observe
from .world import Coord, EntityInstance, Facing, GridWorld, Layer, MoveResult

ACTION_NAMES = ("up", "down", "left", "right", "clean", "noop")

_MOVE_FACINGS = {
    "up": Facing.N,
    "down": Facing.S,
    "left": Facing.W,
    "right": Facing.E,
}


@dataclass(frozen=True)
class ActionSpec:
    """The ordered action set available to an agent, plus the world effects
    that are environment configuration: the bump penalty for blocked moves
    and the handler invoked by ``clean``."""

    actions: tuple[str, ...]
    bump_penalty: float = 0.0
    clean_handler: Optional[Callable[["GridWorld", "Agent"], float]] = None

    def __post_init__(self) -> None:
        if len(set(self.actions)) != len(self.actions):
            raise ConfigError("action names must be unique")
        for name in self.actions:
            if name not in ACTION_NAMES:
                raise ConfigError(f"unknown action name {name!r}")

    @property
    def count(self) -> int:
        return len(self.actions)

    def index_of(self, name: str) -> int:
        try:
            return self.actions.index(name)
        except ValueError:
            raise ConfigError(f"action {name!r} not in spec {self.actions}") from None


@dataclass
class Agent:
    """One embodied agent: board position and facing, its observation and
    action specs, the model driving it, and per-epoch score/done state."""

    id: int
    pos: Coord
    facing: Facing
    obs_spec: ObservationSpec
    action_spec: ActionSpec
    model: "object" = None  # any ModelHandle-conforming object
    score: float = 0.0
    done: bool = False

    def actor_instance(self, agent_kind_code: int) -> EntityInstance:
        return EntityInstance(agent_kind_code, self.id)


@dataclass(frozen=True, eq=False)
class Transition:
    """One (state, action, reward, next_state, done) record."""

    state: Observation
    action: int
    reward: float
    next_state: Observation
    done: bool


@dataclass(frozen=True, eq=False)
class TurnOutcome:
    """A transition tagged with who took it and the action's name."""

    agent_id: int
    action_name: str
    transition: Transition


def observe_agent(world: GridWorld, agent: Agent) -> Observation:
    """The agent's view per its observation spec. Pure in the world."""
    return observe(world, agent.pos, agent.id, agent.obs_spec)


def apply_action(world: GridWorld, agent: Agent, action: int) -> float:
    """Execute one action; returns the reward and updates ``agent.score``.

    Raises ContractError for an out-of-range action index (a model bug).
    """
    spec = agent.action_spec
    if not 0 <= action < spec.count:
        raise ContractError(
            f"agent {agent.id}: action index {action} out of range [0, {spec.count})"
        )
    name = spec.actions[action]
    reward = 0.0
    if name in _MOVE_FACINGS:
        facing = _MOVE_FACINGS[name]
        agent.facing = facing
        d = facing.delta
        target = Coord(agent.pos.row + d.row, agent.pos.col + d.col)
        result = world.move_actor(agent.pos, target)
        if result == MoveResult.MOVED:
            agent.pos = target
            kind = world.vocab[int(world.ground[target.row, target.col])]
            if kind.consumed_on_contact:
                reward += kind.contact_reward
                left = kind.leaves_behind
                restored = world.vocab.ground_empty if left is None else left
                world.add(target, Layer.GROUND, EntityInstance(restored))
        else:
            reward += spec.bump_penalty
    elif name == "clean":
        if spec.clean_handler is None:
            raise ContractError(
                f"agent {agent.id}: 'clean' in action spec but no handler wired"
            )
        reward += spec.clean_handler(world, agent)
    # noop: reward stays 0.0
    agent.score += reward
    return reward


def agent_turn(world: GridWorld, agent: Agent, is_last_turn: bool) -> Transition:
    """Run one full agent transition and deliver it to the agent's model.

    state -> model.take_action -> apply_action -> next state (captured
    before other agents and entity dynamics) -> done flag; the Transition
    reaches model.observe_transition before this returns.
    """
    state = observe_agent(world, agent)
    raw = agent.model.take_action(state)
    try:
        action = int(raw)
    except (TypeError, ValueError):
        raise ContractError(
            f"agent {agent.id}: model returned non-integer action {raw!r}"
        ) from None
    reward = apply_action(world, agent, action)
    next_state = observe_agent(world, agent)
    transition = Transition(state, action, reward, next_state, is_last_turn)
    if is_last_turn:
        agent.done = True
    agent.model.observe_transition(transition)
    return transition
