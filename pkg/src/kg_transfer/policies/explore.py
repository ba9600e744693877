from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..model.triple import MemoryItem
from ..model.vocab import AGENT, AT_LOCATION, DIRECTIONS, WALL, Vocabulary


@dataclass
class MemoryMap:
    """Room adjacency as remembered, after conflict resolution."""

    edges:   dict[int, dict[str, int]] = field(default_factory=dict)   # room -> direction -> target
    visited: dict[int, int]            = field(default_factory=dict)   # room -> last visit step
    wall:    int = -1

    def open_moves(self, room: int) -> list[tuple[str, int]]:
        out = self.edges.get(room, {})
        return [(d, out[d]) for d in DIRECTIONS if d in out and out[d] != self.wall]


def build_memory_map(memory: Sequence[MemoryItem], vocab: Vocabulary) -> MemoryMap:
    """
    Resolve conflicting (room, direction) memories by recency.

    Ranking: last_accessed, then time_added, then position in memory.
    """
    dir_ids = {vocab.relation(d): d for d in DIRECTIONS}
    agent = vocab.entity(AGENT)
    at = vocab.relation(AT_LOCATION)

    best: dict[tuple[int, str], tuple[tuple[int, int, int], int]] = {}
    visited: dict[int, int] = {}
    for pos, item in enumerate(memory):
        t = item.triple
        ann = item.annotations
        if t.relation in dir_ids:
            key = (t.head, dir_ids[t.relation])
            rank = (ann.last_accessed, ann.time_added, pos)
            if key not in best or rank > best[key][0]:
                best[key] = (rank, t.tail)
        elif t.relation == at and t.head == agent:
            visited[t.tail] = max(visited.get(t.tail, -1), ann.last_accessed)

    edges: dict[int, dict[str, int]] = {}
    for (room, direction), (_, target) in best.items():
        edges.setdefault(room, {})[direction] = target
    return MemoryMap(edges=edges, visited=visited, wall=vocab.entity(WALL))


def bfs_first_move(mmap: MemoryMap, start: int) -> tuple[str, int] | None:
    """First move and target of a shortest path to the nearest unvisited room."""
    first: dict[int, str | None] = {start: None}
    queue = deque([start])
    while queue:
        room = queue.popleft()
        for direction, nxt in mmap.open_moves(room):
            if nxt in first:
                continue
            first[nxt] = direction if room == start else first[room]
            if nxt not in mmap.visited:
                return first[nxt], nxt
            queue.append(nxt)
    return None


def explore_action(
    memory: Sequence[MemoryItem],
    current_room: int,
    vocab: Vocabulary,
    rng: np.random.Generator,
) -> str:
    """
    Move toward the nearest unvisited remembered room.

    Falls back to the least recently visited open neighbour, then to a
    random direction not remembered as a wall, then to "stay".
    """
    mmap = build_memory_map(memory, vocab)
    found = bfs_first_move(mmap, current_room)
    if found is not None:
        return found[0]

    moves = mmap.open_moves(current_room)
    if moves:
        direction, _ = min(
            enumerate(moves),
            key=lambda im: (mmap.visited.get(im[1][1], -1), im[0]),
        )[1]
        return direction

    known = mmap.edges.get(current_room, {})
    legal = [d for d in DIRECTIONS if known.get(d) != mmap.wall]
    if not legal:
        return "stay"
    return legal[int(rng.integers(len(legal)))]
