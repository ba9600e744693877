from __future__ import annotations

from typing import Sequence

import numpy as np

from ..env.room_env import Observation, Query
from ..memory.store import (
    EvictionPolicy, LongTermStore, MemoryState, ShortTermBuffer,
    apply_transfer, refresh_short_term,
)
from ..model.vocab import AGENT, AT_LOCATION, UNKNOWN, Vocabulary
from .explore import explore_action
from .qa import QaAnswer, QaKind, answer_query, select_answer


class MemoryAgent:
    """
    Fixed non-transfer behaviour around a pluggable transfer decision.

    Holds both memory tiers and applies the symbolic QA, exploration and
    eviction policies; transfer actions are supplied from outside.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        capacity: int = 128,
        qa: QaKind | str = QaKind.MRU,
        eviction: EvictionPolicy | str = EvictionPolicy.LRU,
        explore_rng: np.random.Generator | None = None,
    ) -> None:
        self.vocab = vocab
        self.qa = QaKind(qa)
        self.eviction = EvictionPolicy(eviction)
        self.long = LongTermStore(capacity)
        self.short = ShortTermBuffer()
        self.now = 0
        self._rng = explore_rng if explore_rng is not None else np.random.default_rng(0)
        self._agent = vocab.entity(AGENT)
        self._at = vocab.relation(AT_LOCATION)
        self._unknown = vocab.entity(UNKNOWN)

    def observe(self, observation: Observation, now: int) -> ShortTermBuffer:
        self.now = now
        self.short = refresh_short_term(observation.triples, now)
        return self.short

    def state(self) -> MemoryState:
        return MemoryState(short=tuple(self.short.items), long=self.long.snapshot(), now=self.now)

    def transfer(self, actions: Sequence[int]) -> None:
        apply_transfer(self.short, actions, self.long, self.eviction, self.now)

    def answer(self, query: Query | None) -> QaAnswer:
        if query is None:
            return QaAnswer(answer=self._unknown, recalled=None)
        return answer_query(
            self.short, self.long, query.head, query.relation, self.qa, self.now, self._unknown,
        )

    def current_room(self) -> int | None:
        """Agent location from short-term memory, else the most recent remembered one."""
        candidates = [
            m for m in (*self.long.items(), *self.short.items)
            if m.triple.head == self._agent and m.triple.relation == self._at
        ]
        best = select_answer(candidates, QaKind.MRU)
        return None if best is None else candidates[best].triple.tail

    def explore(self) -> str:
        room = self.current_room()
        if room is None:
            return "stay"
        memory = [*self.long.items(), *self.short.items]
        return explore_action(memory, room, self.vocab, self._rng)
