"""The experiment loop: epochs of fixed-length episodes.

Each epoch rebuilds its environment from a per-epoch sub-seed
(``split_seed(seed, epoch)``), so any epoch is reproducible in isolation
while learners persist across epochs. Within a turn, agent order is
reshuffled from the world's RNG (no first-mover bias), every live agent
runs its transition, then entity dynamics step and the turn counter
advances.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .agents import Agent, TurnOutcome, agent_turn
from .dynamics import DynamicsSet, WorldChange, step_entities
from .envs import (
    CleanupConfig,
    TreasureHuntConfig,
    build_cleanup,
    build_treasure_hunt,
)
from .errors import ConfigError
from .models import EpsilonSchedule, HumanActionSource, Model, MODEL_KINDS, make_model
from .replay import FrameRecord, ReplayHeader, ReplayWriter, record_frame
from .rng import MODEL_SEED_DOMAIN, split_seed
from .world import GridWorld

ENV_KINDS = ("treasure_hunt", "cleanup")

EnvConfig = Union[TreasureHuntConfig, CleanupConfig]


@dataclass
class ExperimentConfig:
    env: str = "treasure_hunt"
    env_config: EnvConfig = field(default_factory=TreasureHuntConfig)
    seed: int = 0
    epochs: int = 1
    turns_per_epoch: int = 50
    model: Union[str, list[str]] = "random"
    model_params: dict = field(default_factory=dict)
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    record_path: Optional[str] = None
    metrics_path: Optional[str] = None

    @property
    def n_agents(self) -> int:
        return self.env_config.n_agents

    def model_kinds(self) -> list[str]:
        """One model kind per agent slot."""
        if isinstance(self.model, str):
            return [self.model] * self.n_agents
        return list(self.model)

    def validate(self) -> None:
        if self.env not in ENV_KINDS:
            raise ConfigError(f"unknown env {self.env!r} (expected one of {ENV_KINDS})")
        expected = {"treasure_hunt": TreasureHuntConfig, "cleanup": CleanupConfig}[self.env]
        if not isinstance(self.env_config, expected):
            raise ConfigError(
                f"env {self.env!r} needs a {expected.__name__}, got "
                f"{type(self.env_config).__name__}"
            )
        self.env_config.validate()
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.turns_per_epoch < 1:
            raise ConfigError(f"turns_per_epoch must be >= 1, got {self.turns_per_epoch}")
        kinds = self.model_kinds()
        if len(kinds) != self.n_agents:
            raise ConfigError(
                f"{len(kinds)} model kinds for {self.n_agents} agent slots"
            )
        for kind in kinds:
            if kind not in MODEL_KINDS:
                raise ConfigError(
                    f"unknown model kind {kind!r} (expected one of {MODEL_KINDS})"
                )
        for label, p in (("record_path", self.record_path), ("metrics_path", self.metrics_path)):
            if p is not None:
                parent = Path(p).resolve().parent
                if not parent.is_dir():
                    raise ConfigError(f"{label}: directory {parent} does not exist")

    def to_obj(self) -> dict:
        """JSON-ready echo with a stable field order."""
        obj = asdict(self)
        obj["epsilon"] = asdict(self.epsilon)
        return obj


@dataclass
class EpochMetrics:
    epoch: int
    per_agent_reward: list[float]
    mean_loss: Optional[float]
    epsilon: float
    wall_ms: int


def build_env(config: ExperimentConfig, sub_seed: int) -> tuple[GridWorld, list[Agent], DynamicsSet]:
    if config.env == "treasure_hunt":
        return build_treasure_hunt(config.env_config, sub_seed)
    return build_cleanup(config.env_config, sub_seed)


def build_header(config: ExperimentConfig) -> ReplayHeader:
    """The replay header for this config (same for every run of it)."""
    world, agents, _ = build_env(config, split_seed(config.seed, 0))
    return ReplayHeader(
        env=config.env,
        config=config.to_obj(),
        vocab=world.vocab.table(),
        height=world.height,
        width=world.width,
        n_agents=len(agents),
    )


def build_models(
    config: ExperimentConfig,
    human_source: Optional[HumanActionSource] = None,
) -> list[Model]:
    """One model per agent slot, each on its own seeded stream."""
    world, agents, _ = build_env(config, split_seed(config.seed, 0))
    spec = agents[0].obs_spec
    h, w = spec.window_shape(world.height, world.width)
    obs_dim = h * w * len(spec.vocab)
    noop = agents[0].action_spec.index_of("noop")
    models = []
    for i, kind in enumerate(config.model_kinds()):
        models.append(
            make_model(
                kind,
                action_count=agents[i].action_spec.count,
                obs_dim=obs_dim,
                noop_index=noop,
                epsilon=config.epsilon,
                total_epochs=config.epochs,
                seed=split_seed(config.seed, MODEL_SEED_DOMAIN + i),
                params=config.model_params,
                agent_id=i,
                human_source=human_source,
            )
        )
    return models


def run_turn(
    world: GridWorld,
    agents: Sequence[Agent],
    dynamics: DynamicsSet,
    turn_index: int,
    turns_per_epoch: int,
) -> tuple[list[TurnOutcome], list[WorldChange]]:
    """One full turn: shuffled agent transitions, then entity dynamics."""
    order = world.rng.permutation(len(agents))
    is_last = turn_index + 1 == turns_per_epoch
    outcomes = []
    for i in order:
        agent = agents[int(i)]
        if agent.done:
            continue
        transition = agent_turn(world, agent, is_last)
        outcomes.append(
            TurnOutcome(agent.id, agent.action_spec.actions[transition.action], transition)
        )
    changes = step_entities(world, dynamics)
    world.turn += 1
    return outcomes, changes


METRICS_HEADER = "epoch,agent_id,reward,mean_loss,epsilon,wall_ms"


def _metric_rows(m: EpochMetrics, include_wall_ms: bool) -> list[str]:
    loss = "" if m.mean_loss is None else repr(m.mean_loss)
    wall = repr(m.wall_ms) if include_wall_ms else ""
    return [
        f"{m.epoch},{aid},{reward!r},{loss},{m.epsilon!r},{wall}"
        for aid, reward in enumerate(m.per_agent_reward)
    ]


def write_metrics(metrics: Sequence[EpochMetrics], path, include_wall_ms: bool = False) -> None:
    """CSV, one row per (epoch, agent), LF line endings, '.' decimals.

    mean_loss is blank for models that report no loss. wall_ms is blank
    unless explicitly requested: it is the one nondeterministic field,
    and metrics files are byte-reproducible by default.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(METRICS_HEADER + "\n")
        for m in metrics:
            for row in _metric_rows(m, include_wall_ms):
                fh.write(row + "\n")


def run_experiment(
    config: ExperimentConfig,
    models: Optional[Sequence[Model]] = None,
    human_source: Optional[HumanActionSource] = None,
    on_header: Optional[Callable[[ReplayHeader], None]] = None,
    on_frame: Optional[Callable[[FrameRecord], None]] = None,
    on_epoch: Optional[Callable[[EpochMetrics], None]] = None,
    include_wall_ms: bool = False,
) -> list[EpochMetrics]:
    """Run the configured experiment and return per-epoch metrics.

    ``models``, when given, overrides the configured model kinds (the
    replay header still echoes the config as given) -- the hook for
    bring-your-own-model research code and for scripted tests. Learners
    persist across epochs; the environment is rebuilt per epoch from
    ``split_seed(seed, epoch)``. Configuration errors surface before
    epoch 0; on I/O failure partial metrics are already flushed.
    """
    config.validate()
    if models is None:
        models = build_models(config, human_source)
    elif len(models) != config.n_agents:
        raise ConfigError(f"{len(models)} models for {config.n_agents} agent slots")

    header = build_header(config)
    writer = ReplayWriter(config.record_path) if config.record_path else None
    if writer:
        writer.write_header(header)
    if on_header:
        on_header(header)

    metrics_fh = None
    if config.metrics_path:
        metrics_fh = open(config.metrics_path, "w", encoding="utf-8", newline="")
        metrics_fh.write(METRICS_HEADER + "\n")

    all_metrics: list[EpochMetrics] = []
    try:
        for epoch in range(config.epochs):
            t_start = time.perf_counter()
            world, agents, dynamics = build_env(config, split_seed(config.seed, epoch))
            for agent, model in zip(agents, models):
                agent.model = model
                model.reset_episode()
            losses: list[float] = []
            for turn in range(config.turns_per_epoch):
                outcomes, _changes = run_turn(
                    world, agents, dynamics, turn, config.turns_per_epoch
                )
                for model in models:
                    loss = model.train_step()
                    if loss is not None:
                        losses.append(loss)
                if writer or on_frame:
                    frame = record_frame(world, agents, outcomes, epoch, turn)
                    if writer:
                        writer.write_frame(frame)
                    if on_frame:
                        on_frame(frame)
            m = EpochMetrics(
                epoch=epoch,
                per_agent_reward=[a.score for a in sorted(agents, key=lambda a: a.id)],
                mean_loss=(sum(losses) / len(losses)) if losses else None,
                epsilon=config.epsilon.value(epoch, config.epochs),
                wall_ms=int((time.perf_counter() - t_start) * 1000),
            )
            all_metrics.append(m)
            if metrics_fh:
                for row in _metric_rows(m, include_wall_ms):
                    metrics_fh.write(row + "\n")
                metrics_fh.flush()
            if on_epoch:
                on_epoch(m)
    finally:
        if writer:
            writer.close()
        if metrics_fh:
            metrics_fh.close()
    return all_metrics
