"""Tabular Q-learning over digested observation keys.

States are the byte digests of observations (collisions are treated as
negligible for the shipped window sizes). Missing keys read as the
``default_q`` vector. Updates happen online in ``observe_transition``;
``train_step`` is a no-op because there is no separate fitting phase.
"""

from __future__ import annotations

import numpy as np

from ..agents import Transition
from ..errors import ConfigError
from ..observations import Observation
from ..rng import make_rng
from .base import EpsilonSchedule, Model, epsilon_greedy
from .io import read_records, write_records


class QTableLearner(Model):
    def __init__(
        self,
        action_count: int,
        alpha: float = 0.1,
        gamma: float = 0.9,
        default_q: float = 0.0,
        epsilon: EpsilonSchedule = EpsilonSchedule(),
        total_epochs: int = 1,
        seed: int = 0,
    ):
        if not 0.0 < alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0,1], got {alpha}")
        if not 0.0 <= gamma < 1.0:
            raise ConfigError(f"gamma must be in [0,1), got {gamma}")
        self.action_count = action_count
        self.alpha = alpha
        self.gamma = gamma
        self.default_q = default_q
        self.epsilon = epsilon
        self.total_epochs = total_epochs
        self.rng = make_rng(seed)
        self.table: dict[bytes, np.ndarray] = {}
        self._episode = -1  # becomes 0 on the first reset_episode()

    def q_values(self, key: bytes) -> np.ndarray:
        """The action-value vector for a state key; default for unseen keys."""
        vec = self.table.get(key)
        if vec is None:
            vec = np.full(self.action_count, self.default_q, dtype=np.float64)
            self.table[key] = vec
        return vec

    def current_epsilon(self) -> float:
        return self.epsilon.value(max(0, self._episode), self.total_epochs)

    def take_action(self, observation: Observation) -> int:
        return epsilon_greedy(self.q_values(observation.key()), self.current_epsilon(), self.rng)

    def observe_transition(self, transition: Transition) -> None:
        q_update(self, transition)

    def reset_episode(self) -> None:
        # Called at the start of every epoch, including the first.
        self._episode += 1

    def save(self, path) -> None:
        write_records(path, self.table)

    def load(self, path) -> None:
        self.table = {k: np.asarray(v, dtype=np.float64) for k, v in read_records(path).items()}


def q_update(table: QTableLearner, t: Transition) -> float:
    """One Q-learning backup; returns the updated cell value.

    target = r + (0 if done else gamma * max_a' Q(next, a'))
    Q(s, a) += alpha * (target - Q(s, a))
    """
    if not 0 <= t.action < table.action_count:
        raise ConfigError(f"action {t.action} out of range [0, {table.action_count})")
    q = table.q_values(t.state.key())
    if t.done:
        target = t.reward
    else:
        target = t.reward + table.gamma * float(np.max(table.q_values(t.next_state.key())))
    q[t.action] += table.alpha * (target - q[t.action])
    return float(q[t.action])
