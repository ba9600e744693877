from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..memory.store import MemoryState


@dataclass(frozen=True)
class Transition:
    """(M_t, a_t, r_t, M_{t+1}, d_t); one action per short-term item of M_t."""

    state:      MemoryState
    actions:    tuple[int, ...]
    reward:     float
    next_state: MemoryState
    done:       bool

    def __post_init__(self) -> None:
        if len(self.actions) != len(self.state.short):
            raise UsageError(
                f"Transition has {len(self.actions)} actions for {len(self.state.short)} short-term items"
            )


class ReplayBuffer:
    """Ring buffer with uniform sampling without replacement inside a batch."""

    def __init__(
        self,
        capacity: int = 20_000,
        warm_start: int = 2_000,
        batch_size: int = 32,
        seed: int = 0,
    ) -> None:
        self.capacity = capacity
        self.warm_start = warm_start
        self.batch_size = batch_size
        self._storage: deque[Transition] = deque(maxlen=capacity)
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return len(self._storage)

    @property
    def ready(self) -> bool:
        return len(self._storage) >= self.warm_start

    def push(self, transition: Transition) -> None:
        self._storage.append(transition)

    def sample(self) -> list[Transition]:
        if not self.ready:
            raise UsageError(
                f"Replay holds {len(self)} transitions; sampling starts at warm_start={self.warm_start}"
            )
        idx = self._rng.choice(len(self._storage), size=self.batch_size, replace=False)
        return [self._storage[i] for i in idx]
