"""magrid: a deterministic, seedable multi-agent gridworld engine.

Worlds are two-layer glyph grids; agents perceive through swappable
observation specs, act through action specs, and decide through any
object matching the small model contract. Ships with Treasure Hunt and
Cleanup environments, tabular-Q and DQN learners, an experiment runner,
bit-exact trajectory replay, and a live session server for human play.
"""

from .agents import ActionSpec, Agent, Transition, TurnOutcome, agent_turn, apply_action, observe_agent
from .dynamics import DynamicsSet, SpawnRule, WorldChange, apply_spawn_rule, step_entities
from .envs import CleanupConfig, TreasureHuntConfig, build_cleanup, build_treasure_hunt
from .models import (
    DqnLearner,
    EpsilonSchedule,
    HumanActionSource,
    HumanModel,
    Model,
    QTableLearner,
    RandomPolicy,
    ReplayBuffer,
    ScriptedPolicy,
    epsilon_greedy,
)
from .observations import Observation, ObservationSpec, observe
from .replay import FrameRecord, ReplayHeader, read_replay, record_frame, render_ascii, write_replay
from .rng import make_rng, split_seed
from .runner import (
    EpochMetrics,
    ExperimentConfig,
    run_experiment,
    run_turn,
    write_metrics,
)
from .world import (
    Coord,
    EntityInstance,
    EntityKind,
    Facing,
    GridWorld,
    Layer,
    MoveResult,
    Region,
    Vocabulary,
    new_world,
)

__version__ = "0.1.0"
