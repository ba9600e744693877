from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from enum import Enum

import numpy as np

from ..model.vocab import AGENT, DIRECTIONS, WALL
from ..schema.config_schema import WorldConfig

ROOM_WORDS: tuple[str, ...] = (
    "playroom", "studio", "living", "kitchen", "bedroom", "bathroom", "office",
    "library", "garage", "hallway", "attic", "basement", "pantry", "laundry",
    "nursery", "gym", "cellar", "den", "foyer", "lounge", "parlor", "porch",
    "sunroom", "study", "workshop", "closet", "balcony", "dining", "gallery",
    "terrace",
)
STATIC_WORDS: tuple[str, ...] = (
    "table", "sofa", "lamp", "bookshelf", "desk", "bed", "piano", "fridge",
    "stove", "chair", "wardrobe", "mirror", "rug", "clock", "tv", "plant",
    "vase", "bench", "cabinet", "sink",
)
MOVING_WORDS: tuple[str, ...] = (
    "john", "william", "mary", "emma", "james", "olivia", "liam", "sophia",
    "noah", "ava", "lucas", "mia", "henry", "ella", "jack", "grace", "leo",
    "zoe", "oscar", "ruby",
)

# (row, col) offsets; row 0 is the northern edge
DIRECTION_OFFSETS: dict[str, tuple[int, int]] = {
    "north": (-1, 0),
    "south": (1, 0),
    "east":  (0, 1),
    "west":  (0, -1),
}
WALL_PERIODS: tuple[int, ...] = (4, 6, 8, 10)


class EntityCategory(str, Enum):
    ROOM          = "room"
    AGENT         = "agent"
    STATIC_OBJECT = "static_object"
    MOVING_OBJECT = "moving_object"
    WALL          = "wall"
    UNKNOWN       = "unknown"


@dataclass(frozen=True)
class Wall:
    """A periodic wall on the interior edge between rooms a and b (a < b)."""

    a:           int
    b:           int
    period:      int
    phase:       int
    closed_span: int


def wall_closed(wall: Wall, t: int) -> bool:
    return (t + wall.phase) % wall.period < wall.closed_span


@dataclass(frozen=True)
class WorldLayout:
    """Everything about the world that depends on world_seed only."""

    grid_length:  int
    room_names:   tuple[str, ...]
    static_names: tuple[str, ...]
    moving_names: tuple[str, ...]
    walls:        tuple[Wall, ...]
    start_rooms:  tuple[int, ...]   # per object, static first then moving
    agent_start:  int = 0

    @property
    def object_names(self) -> tuple[str, ...]:
        return self.static_names + self.moving_names

    @property
    def num_rooms(self) -> int:
        return len(self.room_names)

    def is_moving(self, obj: int) -> bool:
        return obj >= len(self.static_names)

    def position(self, room: int) -> tuple[int, int]:
        return divmod(room, self.grid_length)

    def room_at(self, row: int, col: int) -> int | None:
        if 0 <= row < self.grid_length and 0 <= col < self.grid_length:
            return row * self.grid_length + col
        return None

    def neighbor(self, room: int, direction: str) -> int | None:
        row, col = self.position(room)
        dr, dc = DIRECTION_OFFSETS[direction]
        return self.room_at(row + dr, col + dc)

    def walls_between(self, a: int, b: int) -> list[Wall]:
        lo, hi = min(a, b), max(a, b)
        return list(self._wall_index.get((lo, hi), ()))

    def passage_open(self, room: int, direction: str, t: int) -> bool:
        other = self.neighbor(room, direction)
        if other is None:
            return False
        return not any(wall_closed(w, t) for w in self.walls_between(room, other))

    def open_neighbors(self, room: int, t: int) -> list[int]:
        return [
            self.neighbor(room, d) for d in DIRECTIONS if self.passage_open(room, d, t)
        ]

    def category(self, label: str) -> EntityCategory:
        if label == AGENT:
            return EntityCategory.AGENT
        if label == WALL:
            return EntityCategory.WALL
        if label in self.static_names:
            return EntityCategory.STATIC_OBJECT
        if label in self.moving_names:
            return EntityCategory.MOVING_OBJECT
        if label in self.room_names:
            return EntityCategory.ROOM
        return EntityCategory.UNKNOWN

    @cached_property
    def _wall_index(self) -> dict[tuple[int, int], tuple[Wall, ...]]:
        index: dict[tuple[int, int], list[Wall]] = {}
        for w in self.walls:
            index.setdefault((w.a, w.b), []).append(w)
        return {k: tuple(v) for k, v in index.items()}


def _names(words: tuple[str, ...], count: int, prefix: str, rng: np.random.Generator) -> list[str]:
    order = rng.permutation(len(words))
    picked = [words[i] for i in order[:count]]
    picked.extend(f"{prefix}_{i}" for i in range(len(picked), count))
    return picked


def interior_edges(grid_length: int) -> list[tuple[int, int]]:
    edges: list[tuple[int, int]] = []
    for row in range(grid_length):
        for col in range(grid_length):
            room = row * grid_length + col
            if col + 1 < grid_length:
                edges.append((room, room + 1))
            if row + 1 < grid_length:
                edges.append((room, room + grid_length))
    return edges


def build_layout(config: WorldConfig) -> WorldLayout:
    """
    Deterministic world layout from config.world_seed.

    Draw order is fixed (names, walls, object placement) so a layout never
    changes when unrelated episode settings do.
    """
    rng = np.random.default_rng(np.random.SeedSequence([config.world_seed, 0x1A70]))
    n_rooms = config.num_rooms

    rooms = _names(ROOM_WORDS, n_rooms, "room", rng)
    statics = _names(STATIC_WORDS, config.num_static_objects, "object", rng)
    movings = _names(MOVING_WORDS, config.num_moving_objects, "person", rng)

    edges = interior_edges(config.grid_length)
    chosen = sorted(rng.choice(len(edges), size=config.num_inner_walls, replace=False).tolist())
    walls = []
    for idx in chosen:
        a, b = edges[idx]
        period = int(rng.choice(WALL_PERIODS))
        walls.append(Wall(a=a, b=b, period=period, phase=int(rng.integers(period)), closed_span=period // 2))

    free = np.full(n_rooms, config.room_slots)
    start_rooms = []
    for _ in range(config.num_objects):
        candidates = np.flatnonzero(free > 0)
        room = int(rng.choice(candidates))
        free[room] -= 1
        start_rooms.append(room)

    return WorldLayout(
        grid_length=config.grid_length,
        room_names=tuple(rooms),
        static_names=tuple(statics),
        moving_names=tuple(movings),
        walls=tuple(walls),
        start_rooms=tuple(start_rooms),
    )

