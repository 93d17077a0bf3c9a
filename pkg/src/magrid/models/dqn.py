"""A minimal deep Q-learner built from first principles.

The value network is a plain fully-connected net (rectifier hidden
layers, identity output) in float64, trained by exact backpropagation
and plain gradient descent -- no momentum or adaptive moments, so the
analytic gradients can be verified against finite differences. A ring
replay buffer and a periodically-synced target network complete the
standard recipe.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..agents import Transition
from ..errors import ConfigError, ContractError
from ..observations import Observation
from ..rng import make_rng
from .base import EpsilonSchedule, Model, epsilon_greedy
from .io import read_layers, write_layers


class Mlp:
    """Fully-connected net: affine + ReLU per hidden layer, affine output.

    ``layer_sizes`` runs input..output; weights are ``(fan_in, fan_out)``
    float64 matrices applied as ``x @ W + b``.
    """

    def __init__(self, layer_sizes: Sequence[int], rng: np.random.Generator | None = None):
        if len(layer_sizes) < 2:
            raise ConfigError("need at least input and output sizes")
        if any(s < 1 for s in layer_sizes):
            raise ConfigError(f"layer sizes must be >= 1, got {list(layer_sizes)}")
        self.layer_sizes = list(layer_sizes)
        rng = rng or make_rng(0)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)  # He init for rectifier nets
            self.weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out, dtype=np.float64))

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Batch or single-vector forward pass; deterministic."""
        single = x.ndim == 1
        h = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if h.shape[1] != self.layer_sizes[0]:
            raise ContractError(
                f"input width {h.shape[1]} != expected {self.layer_sizes[0]}"
            )
        for i in range(self.n_layers):
            h = h @ self.weights[i] + self.biases[i]
            if i < self.n_layers - 1:
                h = np.maximum(h, 0.0)
        return h[0] if single else h

    def forward_cached(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Forward pass keeping post-activation values per layer for backprop."""
        h = np.atleast_2d(np.asarray(x, dtype=np.float64))
        acts = [h]
        for i in range(self.n_layers):
            h = h @ self.weights[i] + self.biases[i]
            if i < self.n_layers - 1:
                h = np.maximum(h, 0.0)
            acts.append(h)
        return h, acts

    def gradients(
        self, acts: list[np.ndarray], d_out: np.ndarray
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        """Backpropagate d(loss)/d(output) through the cached activations;
        returns per-layer (dW, db), outermost layer last."""
        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * self.n_layers  # type: ignore
        delta = d_out
        for i in range(self.n_layers - 1, -1, -1):
            grads[i] = (acts[i].T @ delta, delta.sum(axis=0))
            if i > 0:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0.0)
        return grads

    def apply_gradients(self, grads, lr: float) -> None:
        for i, (dw, db) in enumerate(grads):
            self.weights[i] -= lr * dw
            self.biases[i] -= lr * db

    def copy_from(self, other: "Mlp") -> None:
        self.layer_sizes = list(other.layer_sizes)
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]


def mlp_forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """Q-values for one input vector."""
    return net.forward(np.asarray(x, dtype=np.float64))


class ReplayBuffer:
    """Fixed-capacity ring of transitions; eviction is strictly oldest-first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ConfigError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._items)

    def push(self, t: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(t)
        else:
            self._items[self._next] = t
        self._next = (self._next + 1) % self.capacity

    def snapshot(self) -> list[Transition]:
        """Contents in insertion order, oldest first."""
        if len(self._items) < self.capacity:
            return list(self._items)
        return self._items[self._next:] + self._items[: self._next]

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        """Uniform sample with replacement; one index draw per element."""
        idx = rng.integers(0, len(self._items), size=batch_size)
        return [self._items[int(i)] for i in idx]


class DqnLearner(Model):
    """Online/target Q-network pair over flattened observations."""

    def __init__(
        self,
        obs_dim: int,
        action_count: int,
        hidden: Sequence[int] = (64, 64),
        lr: float = 1e-3,
        gamma: float = 0.9,
        batch_size: int = 32,
        buffer_capacity: int = 10_000,
        sync_interval: int = 100,
        epsilon: EpsilonSchedule = EpsilonSchedule(),
        total_epochs: int = 1,
        seed: int = 0,
    ):
        if lr <= 0:
            raise ConfigError(f"lr must be > 0, got {lr}")
        if not 0.0 <= gamma < 1.0:
            raise ConfigError(f"gamma must be in [0,1), got {gamma}")
        if sync_interval < 1:
            raise ConfigError(f"sync_interval must be >= 1, got {sync_interval}")
        self.action_count = action_count
        self.rng = make_rng(seed)
        sizes = [obs_dim, *hidden, action_count]
        self.online = Mlp(sizes, self.rng)
        self.target = Mlp(sizes, self.rng)
        self.target.copy_from(self.online)
        self.buffer = ReplayBuffer(buffer_capacity)
        self.batch_size = batch_size
        self.lr = lr
        self.gamma = gamma
        self.sync_interval = sync_interval
        self.train_counter = 0
        self.epsilon = epsilon
        self.total_epochs = total_epochs
        self._episode = -1

    def current_epsilon(self) -> float:
        return self.epsilon.value(max(0, self._episode), self.total_epochs)

    def take_action(self, observation: Observation) -> int:
        q = self.online.forward(observation.vector())
        return epsilon_greedy(q, self.current_epsilon(), self.rng)

    def observe_transition(self, transition: Transition) -> None:
        self.buffer.push(transition)

    def reset_episode(self) -> None:
        self._episode += 1

    def train_step(self) -> Optional[float]:
        """One minibatch update; None (skip) while the buffer is short.

        Loss is the mean squared error between online Q(s)[a] and the
        bootstrap target r + gamma * max_a' Q_target(s')[a'] (r alone on
        terminal transitions), reported before the update is applied.
        """
        if len(self.buffer) < self.batch_size:
            return None
        batch = self.buffer.sample(self.batch_size, self.rng)
        states = np.stack([t.state.vector() for t in batch])
        next_states = np.stack([t.next_state.vector() for t in batch])
        actions = np.array([t.action for t in batch], dtype=np.int64)
        rewards = np.array([t.reward for t in batch], dtype=np.float64)
        live = np.array([0.0 if t.done else 1.0 for t in batch], dtype=np.float64)

        targets = rewards + live * self.gamma * self.target.forward(next_states).max(axis=1)
        q, acts = self.online.forward_cached(states)
        picked = q[np.arange(len(batch)), actions]
        err = picked - targets
        loss = float(np.mean(err**2))

        d_out = np.zeros_like(q)
        d_out[np.arange(len(batch)), actions] = 2.0 * err / len(batch)
        self.online.apply_gradients(self.online.gradients(acts, d_out), self.lr)

        self.train_counter += 1
        if self.train_counter % self.sync_interval == 0:
            self.target.copy_from(self.online)
        return loss

    def save(self, path) -> None:
        write_layers(path, list(zip(self.online.weights, self.online.biases)))

    def load(self, path) -> None:
        layers = read_layers(path)
        self.online.weights = [w for w, _ in layers]
        self.online.biases = [b for _, b in layers]
        self.online.layer_sizes = [layers[0][0].shape[0]] + [w.shape[1] for w, _ in layers]
        self.target.copy_from(self.online)
