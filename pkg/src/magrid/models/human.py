"""Human-in-the-loop action delivery.

A HumanActionSource is the single cross-thread object in the engine:
submissions arrive from a server/UI thread while the episode loop blocks
in ``next_action`` with a deadline. Each agent has one pending-action
slot per turn with last-writer-wins semantics; the slot is consumed
exactly once, and a turn that hits its deadline resolves to the default
action (noop).
"""

from __future__ import annotations

import logging
import threading
import time
from typing import Callable, Optional

from ..errors import ContractError
from ..observations import Observation
from .base import Model

log = logging.getLogger("magrid.human")

AwaitListener = Callable[[int, float], None]  # (agent_id, deadline_unix_s)


class HumanActionSource:
    def __init__(self, timeout_s: float = 10.0):
        self.timeout_s = timeout_s
        self._lock = threading.Lock()
        self._cond = threading.Condition(self._lock)
        self._pending: dict[int, int] = {}
        self._registered: set[int] = set()
        self._await_listeners: list[AwaitListener] = []

    def register(self, agent_id: int) -> None:
        """Mark an agent slot as human-controlled."""
        with self._lock:
            self._registered.add(agent_id)

    def registered(self) -> set[int]:
        with self._lock:
            return set(self._registered)

    def add_await_listener(self, listener: AwaitListener) -> None:
        """Listener fired (outside the lock) each time a turn starts waiting."""
        self._await_listeners.append(listener)

    def submit(self, agent_id: int, action: int) -> bool:
        """Deliver an action for the agent's current turn.

        Returns True if this overwrote an unconsumed submission (the
        overwrite is also logged); last writer wins.
        """
        with self._cond:
            if agent_id not in self._registered:
                raise ContractError(f"agent {agent_id} is not human-controlled")
            overwrote = agent_id in self._pending
            self._pending[agent_id] = int(action)
            self._cond.notify_all()
        if overwrote:
            log.info("agent %d: pending action overwritten by a later submission", agent_id)
        return overwrote

    def next_action(self, agent_id: int, default: int, timeout_s: Optional[float] = None) -> int:
        """Block until a submission arrives or the deadline passes.

        Consumes the pending slot; returns ``default`` on timeout.
        """
        with self._lock:
            if agent_id not in self._registered:
                raise ContractError(f"agent {agent_id} is not human-controlled")
        timeout = self.timeout_s if timeout_s is None else timeout_s
        deadline = time.monotonic() + timeout
        for listener in self._await_listeners:
            listener(agent_id, time.time() + timeout)
        with self._cond:
            while agent_id not in self._pending:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return default
                self._cond.wait(remaining)
            return self._pending.pop(agent_id)

    def clear(self, agent_id: int) -> None:
        """Drop any unconsumed submission (e.g. on client disconnect)."""
        with self._cond:
            self._pending.pop(agent_id, None)


def human_next_action(
    source: HumanActionSource, agent_id: int, default: int, timeout_s: Optional[float] = None
) -> int:
    return source.next_action(agent_id, default, timeout_s)


class HumanModel(Model):
    """Model-contract adapter: actions come from a HumanActionSource."""

    def __init__(
        self,
        source: HumanActionSource,
        agent_id: int,
        default_action: int,
        timeout_s: Optional[float] = None,
    ):
        self.source = source
        self.agent_id = agent_id
        self.default_action = default_action
        self.timeout_s = timeout_s
        source.register(agent_id)

    def take_action(self, observation: Observation) -> int:
        return self.source.next_action(self.agent_id, self.default_action, self.timeout_s)
