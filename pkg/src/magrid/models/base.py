"""The model contract and the simplest policies.

A model is anything implementing the six shared operations below; agents
call ``take_action`` once per turn and deliver the resulting transition to
``observe_transition``. Researchers can bring their own models by
subclassing Model (or just matching its surface).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..agents import Transition
from ..errors import ConfigError
from ..observations import Observation
from ..rng import make_rng


class Model:
    """Shared model surface: act, learn, and persist.

    ``take_action`` must return an index in ``[0, action_count)``. The
    other operations default to no-ops so stateless policies stay small.
    """

    def take_action(self, observation: Observation) -> int:
        raise NotImplementedError

    def observe_transition(self, transition: Transition) -> None:
        pass

    def train_step(self) -> Optional[float]:
        return None

    def reset_episode(self) -> None:
        pass

    def save(self, path) -> None:
        pass

    def load(self, path) -> None:
        pass


@dataclass(frozen=True)
class EpsilonSchedule:
    """Linear exploration decay: from ``start`` at epoch 0 to ``end`` after
    the first ``decay_fraction`` of total epochs, constant afterwards."""

    start: float = 1.0
    end: float = 0.1
    decay_fraction: float = 0.75

    def __post_init__(self) -> None:
        for label in ("start", "end"):
            v = getattr(self, label)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"epsilon {label} must be in [0,1], got {v}")
        if not 0.0 < self.decay_fraction <= 1.0:
            raise ConfigError(
                f"decay_fraction must be in (0,1], got {self.decay_fraction}"
            )

    def value(self, epoch: int, total_epochs: int) -> float:
        decay_epochs = self.decay_fraction * total_epochs
        progress = min(1.0, max(0, epoch) / decay_epochs) if decay_epochs > 0 else 1.0
        return self.start + (self.end - self.start) * progress


def epsilon_greedy(q_values: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Uniform random index with probability epsilon, else the argmax
    (lowest index wins ties). Always consumes the exploration draw first,
    so the RNG stream layout is independent of epsilon."""
    q_values = np.asarray(q_values)
    if q_values.size == 0:
        raise ConfigError("epsilon_greedy needs a non-empty value vector")
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError(f"epsilon must be in [0,1], got {epsilon}")
    if float(rng.random()) < epsilon:
        return int(rng.integers(0, q_values.size))
    return int(np.argmax(q_values))


class RandomPolicy(Model):
    """Uniform random actions from a private seeded stream."""

    def __init__(self, action_count: int, seed: int = 0):
        if action_count < 1:
            raise ConfigError("action_count must be >= 1")
        self.action_count = action_count
        self.rng = make_rng(seed)

    def take_action(self, observation: Observation) -> int:
        return int(self.rng.integers(0, self.action_count))


class ScriptedPolicy(Model):
    """Plays a fixed action sequence, then ``fallback`` forever.

    The cursor does not reset between episodes: one instance scripts one
    whole run, which is what replay-equivalence tests need.
    """

    def __init__(self, script: Sequence[int], fallback: int = 0):
        self.script = tuple(int(a) for a in script)
        self.fallback = int(fallback)
        self.cursor = 0

    def take_action(self, observation: Observation) -> int:
        if self.cursor < len(self.script):
            action = self.script[self.cursor]
            self.cursor += 1
            return action
        return self.fallback
