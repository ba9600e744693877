from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import UsageError
from ..model.triple import Triple
from ..model.vocab import AGENT, AT_LOCATION, DIRECTIONS, WALL, Vocabulary
from ..schema.config_schema import WorldConfig
from .layout import WorldLayout, build_layout, wall_closed

logger = logging.getLogger(__name__)

MOVES: tuple[str, ...] = (*DIRECTIONS, "stay")

# stream ids mixed into the per-episode seed sequences
_SHUFFLE_STREAM = 1
_MOVE_STREAM = 2
_QUERY_STREAM = 3
_SPLIT_CODE = {"train": 0, "test": 1}


@dataclass(frozen=True)
class HiddenState:
    """Full simulator state; rooms and objects are layout indices."""

    step:         int
    agent_room:   int
    object_rooms: tuple[int, ...]
    wall_states:  tuple[bool, ...]   # True = closed, aligned with layout.walls

    def to_dict(self, layout: WorldLayout) -> dict[str, Any]:
        return {
            "step": self.step,
            "agent_room": layout.room_names[self.agent_room],
            "object_rooms": {
                name: layout.room_names[room]
                for name, room in zip(layout.object_names, self.object_rooms)
            },
            "closed_walls": [i for i, closed in enumerate(self.wall_states) if closed],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], layout: WorldLayout) -> "HiddenState":
        room_index = {name: i for i, name in enumerate(layout.room_names)}
        closed = set(data.get("closed_walls", ()))
        return cls(
            step=int(data["step"]),
            agent_room=room_index[data["agent_room"]],
            object_rooms=tuple(room_index[data["object_rooms"][n]] for n in layout.object_names),
            wall_states=tuple(i in closed for i in range(len(layout.walls))),
        )


@dataclass(frozen=True)
class Observation:
    triples: tuple[Triple, ...]


@dataclass(frozen=True)
class Query:
    """(head, at_location, ?) with the hidden answer."""

    head:     int
    relation: int
    truth:    int


@dataclass(frozen=True)
class StepResult:
    state:       HiddenState
    observation: Observation
    query:       Query | None
    reward:      float
    done:        bool


class RoomEnv:
    """
    Partially observable room grid.

    The agent sees the induced subgraph of its current room each step and
    must answer one object-location query per step; reward is 1.0 for a
    correct answer and 0.0 otherwise.
    """

    def __init__(self, config: WorldConfig, vocab: Vocabulary | None = None) -> None:
        self.config = config
        self.layout = build_layout(config)
        self.vocab = vocab or Vocabulary.for_world(self.layout.room_names, self.layout.object_names)
        self._room_ids = [self.vocab.entity(n) for n in self.layout.room_names]
        self._object_ids = [self.vocab.entity(n) for n in self.layout.object_names]
        self._agent = self.vocab.entity(AGENT)
        self._wall = self.vocab.entity(WALL)
        self._at = self.vocab.relation(AT_LOCATION)
        self._dirs = {d: self.vocab.relation(d) for d in DIRECTIONS}
        self._state: HiddenState | None = None
        self._query: Query | None = None
        self._schedule: list[int] = []

    # ------------------------------------------------------------------ #
    # Public API
    # ------------------------------------------------------------------ #

    @property
    def state(self) -> HiddenState:
        if self._state is None:
            raise UsageError("Environment has not been reset")
        return self._state

    def room_entity(self, room: int) -> int:
        return self._room_ids[room]

    def reset(self, episode_seed: int) -> tuple[HiddenState, Observation, Query | None]:
        cfg = self.config
        base = [cfg.world_seed, episode_seed]
        self._shuffle_rng = np.random.default_rng(np.random.SeedSequence(base + [_SHUFFLE_STREAM]))
        self._move_rng = np.random.default_rng(np.random.SeedSequence(base + [_MOVE_STREAM]))
        query_rng = np.random.default_rng(
            np.random.SeedSequence(base + [_QUERY_STREAM, _SPLIT_CODE[cfg.query_split]])
        )
        self._schedule = query_rng.permutation(len(self.layout.object_names)).tolist()

        self._state = HiddenState(
            step=0,
            agent_room=self.layout.agent_start,
            object_rooms=self.layout.start_rooms,
            wall_states=self._walls_at(0),
        )
        self._query = self._make_query(self._state)
        logger.debug("reset world_seed=%d episode_seed=%d split=%s", cfg.world_seed, episode_seed, cfg.query_split)
        return self._state, self._observe(self._state), self._query

    def step(self, move: str, answer: int) -> StepResult:
        state = self.state
        if state.step >= self.config.horizon:
            raise UsageError(
                f"Episode finished at step {state.step}; call reset() before stepping again"
            )
        if move not in MOVES:
            raise UsageError(f"Unknown move '{move}'. Valid moves: {list(MOVES)}")

        reward = 1.0 if self._query is not None and answer == self._query.truth else 0.0

        t = state.step
        agent_room = state.agent_room
        if move != "stay" and self.layout.passage_open(agent_room, move, t):
            agent_room = self.layout.neighbor(agent_room, move)

        object_rooms = self._move_objects(state.object_rooms, t + 1)
        nxt = HiddenState(
            step=t + 1,
            agent_room=agent_room,
            object_rooms=object_rooms,
            wall_states=self._walls_at(t + 1),
        )
        done = nxt.step == self.config.horizon
        self._state = nxt
        self._query = None if done else self._make_query(nxt)
        return StepResult(nxt, self._observe(nxt), self._query, reward, done)

    def query_schedule(self, length: int | None = None) -> list[str]:
        """Queried object labels for steps 0..length-1 of the current episode."""
        length = self.config.horizon if length is None else length
        names = self.layout.object_names
        if not names:
            return []
        return [names[self._schedule[t % len(names)]] for t in range(length)]

    # ------------------------------------------------------------------ #
    # Dynamics
    # ------------------------------------------------------------------ #

    def _walls_at(self, t: int) -> tuple[bool, ...]:
        return tuple(wall_closed(w, t) for w in self.layout.walls)

    def _move_objects(self, rooms: tuple[int, ...], t: int) -> tuple[int, ...]:
        moved = list(rooms)
        for obj, room in enumerate(rooms):
            if not self.layout.is_moving(obj):
                continue
            # lazy random walk: stay with probability 0.5
            if self._move_rng.random() < 0.5:
                continue
            options = self.layout.open_neighbors(room, t)
            if options:
                moved[obj] = options[int(self._move_rng.integers(len(options)))]
        return tuple(moved)

    def _make_query(self, state: HiddenState) -> Query | None:
        if not self._schedule:
            return None
        obj = self._schedule[state.step % len(self._schedule)]
        return Query(
            head=self._object_ids[obj],
            relation=self._at,
            truth=self._room_ids[state.object_rooms[obj]],
        )

    def _observe(self, state: HiddenState) -> Observation:
        room = state.agent_room
        here = self._room_ids[room]
        triples = [Triple(self._agent, self._at, here)]
        for d in DIRECTIONS:
            if self.layout.passage_open(room, d, state.step):
                target = self._room_ids[self.layout.neighbor(room, d)]
            else:
                target = self._wall
            triples.append(Triple(here, self._dirs[d], target))
        for obj, obj_room in enumerate(state.object_rooms):
            if obj_room == room:
                triples.append(Triple(self._object_ids[obj], self._at, here))
        order = self._shuffle_rng.permutation(len(triples))
        return Observation(tuple(triples[i] for i in order))
