from __future__ import annotations

import numpy as np
import torch

from ..memory.store import LongTermStore, MemoryState, ShortTermBuffer
from ..model.graph_view import GraphMode
from ..neural.qnet import TransferQNetwork
from ..policies.transfer import TransferPolicy
from .actions import select_actions
from .td import encode_states


class LearnedTransfer(TransferPolicy):
    """
    Epsilon-greedy transfer decisions from a TransferQNetwork.

    The encoder input follows graph_mode (short-term edges only, or the
    union with long-term memory). The per-item Q rows of the last call are
    kept in last_q for the decision log; global heads repeat their pooled
    row for every item.
    """

    NAME = "learned"

    def __init__(
        self,
        network: TransferQNetwork,
        head: str = "local",
        graph_mode: GraphMode | str = GraphMode.STM_ONLY,
        horizon: int = 100,
        epsilon: float = 0.0,
    ) -> None:
        self.network = network
        self.head = head
        self.graph_mode = GraphMode(graph_mode)
        self.horizon = horizon
        self.epsilon = epsilon
        self.last_q: np.ndarray = np.zeros((0, 2))

    def q_rows(self, short: ShortTermBuffer, long: LongTermStore) -> torch.Tensor:
        state = MemoryState(short=tuple(short.items), long=long.snapshot(), now=short.step)
        batch = encode_states([state], self.network, self.graph_mode, self.horizon)
        with torch.no_grad():
            if self.head == "global":
                return self.network.q_values_global(batch)
            return self.network.q_values_local(batch)

    def decide(
        self, short: ShortTermBuffer, long: LongTermStore, rng: np.random.Generator,
    ) -> list[int]:
        n = len(short)
        if n == 0:
            self.last_q = np.zeros((0, 2))
            return []
        q = self.q_rows(short, long).cpu().numpy()
        if self.head == "global":
            self.last_q = np.repeat(q, n, axis=0)
            return select_actions(q, self.epsilon, rng, n=n)
        self.last_q = q
        return select_actions(q, self.epsilon, rng)
