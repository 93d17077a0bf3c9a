"""Shipped policies and learners behind the shared model contract."""

from __future__ import annotations

from ..errors import ConfigError
from .base import EpsilonSchedule, Model, RandomPolicy, ScriptedPolicy, epsilon_greedy
from .dqn import DqnLearner, Mlp, ReplayBuffer, mlp_forward
from .human import HumanActionSource, HumanModel, human_next_action
from .tabular import QTableLearner, q_update

MODEL_KINDS = ("random", "tabular_q", "dqn", "human")

_TABULAR_PARAMS = {"alpha", "gamma", "default_q"}
_DQN_PARAMS = {"hidden", "lr", "gamma", "batch_size", "buffer_capacity", "sync_interval"}
_HUMAN_PARAMS = {"timeout_s"}


def make_model(
    kind: str,
    *,
    action_count: int,
    obs_dim: int,
    noop_index: int,
    epsilon: EpsilonSchedule,
    total_epochs: int,
    seed: int,
    params: dict | None = None,
    agent_id: int = 0,
    human_source: HumanActionSource | None = None,
) -> Model:
    """Build one model slot from its config-file description."""
    params = dict(params or {})

    def take(allowed: set[str]) -> dict:
        unknown = set(params) - allowed
        if unknown:
            raise ConfigError(
                f"unknown model_params for {kind!r}: {sorted(unknown)}"
            )
        return params

    if kind == "random":
        take(set())
        return RandomPolicy(action_count, seed=seed)
    if kind == "tabular_q":
        return QTableLearner(
            action_count,
            epsilon=epsilon,
            total_epochs=total_epochs,
            seed=seed,
            **take(_TABULAR_PARAMS),
        )
    if kind == "dqn":
        return DqnLearner(
            obs_dim,
            action_count,
            epsilon=epsilon,
            total_epochs=total_epochs,
            seed=seed,
            **take(_DQN_PARAMS),
        )
    if kind == "human":
        if human_source is None:
            raise ConfigError("a human agent slot needs a HumanActionSource")
        return HumanModel(
            human_source, agent_id, noop_index, **take(_HUMAN_PARAMS)
        )
    raise ConfigError(f"unknown model kind {kind!r} (expected one of {MODEL_KINDS})")


__all__ = [
    "DqnLearner",
    "EpsilonSchedule",
    "HumanActionSource",
    "HumanModel",
    "Mlp",
    "Model",
    "MODEL_KINDS",
    "QTableLearner",
    "RandomPolicy",
    "ReplayBuffer",
    "ScriptedPolicy",
    "epsilon_greedy",
    "human_next_action",
    "make_model",
    "mlp_forward",
    "q_update",
]
