"""
Randomized oracle checks run by `kg_transfer selfcheck`.

Every check compares a library routine against an independent brute-force
recomputation on seeded random instances and returns a CheckResult.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np
import torch

from .memory.store import (
    DROP, LongTermStore, MemoryState, ShortTermBuffer, apply_transfer, touch_on_recall,
)
from .model.graph_view import build_graph_view
from .model.triple import MemoryItem, TemporalAnnotations, Triple
from .model.vocab import AGENT, AT_LOCATION, DIRECTIONS, WALL, Vocabulary
from .neural.gradcheck import check_gradients
from .neural.qnet import TransferQNetwork
from .neural.tensorize import tensorize
from .policies.explore import build_memory_map, bfs_first_move
from .policies.qa import answer_query
from .rl.replay import Transition
from .rl.schedule import epsilon_at
from .rl.td import td_targets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name:   str
    passed: bool
    detail: str = ""


class CheckFailed(AssertionError):
    pass


def _expect(condition: bool, detail: str) -> None:
    if not condition:
        raise CheckFailed(detail)


def _random_item(rng: np.random.Generator, triple: Triple, now: int) -> MemoryItem:
    ta = int(rng.integers(0, now + 1))
    return MemoryItem(
        triple,
        TemporalAnnotations(ta, ta + int(rng.integers(0, now - ta + 1)), int(rng.integers(0, 4))),
    )


# ---------------------------------------------------------------------- #
# Memory
# ---------------------------------------------------------------------- #

def check_eviction(rng: np.random.Generator, trials: int = 200) -> None:
    """apply_transfer against a list model with brute-force argmin eviction."""
    for trial in range(trials):
        capacity = int(rng.choice([1, 4, 32, 128]))
        policy = str(rng.choice(["fifo", "lru", "lfu"]))
        store = LongTermStore(capacity)
        model: list[list] = []   # [triple, item, insertion]
        counter = 0
        for now in range(int(rng.integers(5, 40))):
            pool = int(rng.integers(2, 3 * capacity + 3))
            triples = [Triple(int(rng.integers(pool)), 0, int(rng.integers(pool))) for _ in range(int(rng.integers(0, 8)))]
            triples = list(dict.fromkeys(triples))
            short = ShortTermBuffer([MemoryItem(t, TemporalAnnotations.fresh(now)) for t in triples], now)
            actions = [int(a) for a in rng.integers(0, 2, len(triples))]
            apply_transfer(short, actions, store, policy, now)

            for item, action in zip(short.items, actions):
                if action == DROP:
                    continue
                hit = [row for row in model if row[0] == item.triple]
                if hit:
                    hit[0][1] = hit[0][1].accessed(now)
                    continue
                model.append([item.triple, item, counter])
                counter += 1
                if len(model) > capacity:
                    def key(row):
                        ann = row[1].annotations
                        primary = {"fifo": row[2], "lru": ann.last_accessed, "lfu": ann.num_recalled}[policy]
                        return (primary, row[2])
                    model.remove(sorted(model, key=key)[0])

            # occasional recall to vary num_recalled
            if model and rng.random() < 0.5:
                row = model[int(rng.integers(len(model)))]
                row[1] = touch_on_recall(row[1], now)
                store.replace(row[1])

            _expect(len(store) <= capacity, f"trial {trial}: store holds {len(store)} > {capacity}")
            _expect(
                store.items() == [row[1] for row in model],
                f"trial {trial} ({policy}, K={capacity}) step {now}: store diverges from oracle",
            )


# ---------------------------------------------------------------------- #
# Policies
# ---------------------------------------------------------------------- #

def check_qa(rng: np.random.Generator, trials: int = 300) -> None:
    for trial in range(trials):
        kind = str(rng.choice(["mra", "mru", "mfu"]))
        now = int(rng.integers(1, 30))
        store = LongTermStore(64)
        for _ in range(int(rng.integers(0, 12))):
            t = Triple(int(rng.integers(3)), 0, int(rng.integers(10)))
            if t not in store:
                store.insert(_random_item(rng, t, now))
        short = ShortTermBuffer(
            [MemoryItem(Triple(int(rng.integers(3)), 0, int(rng.integers(10))), TemporalAnnotations.fresh(now))
             for _ in range(int(rng.integers(0, 4)))],
            now,
        )
        head = int(rng.integers(3))
        pool = [m for m in [*store.items(), *short.items] if m.triple.head == head]
        field = {"mra": "time_added", "mru": "last_accessed", "mfu": "num_recalled"}[kind]
        ranked = sorted(
            range(len(pool)),
            key=lambda i: (getattr(pool[i].annotations, field), pool[i].annotations.time_added, i),
        )
        expected = pool[ranked[-1]].triple.tail if pool else -1
        got = answer_query(short, store, head, 0, kind, now, -1)
        _expect(got.answer == expected, f"trial {trial} ({kind}): answered {got.answer}, oracle {expected}")


def _grid_vocab(n: int) -> tuple[Vocabulary, list[int]]:
    rooms = [f"r{i}" for i in range(n * n)]
    vocab = Vocabulary.for_world(rooms, [])
    return vocab, [vocab.entity(r) for r in rooms]


_STEP = {"north": (-1, 0), "south": (1, 0), "east": (0, 1), "west": (0, -1)}


def check_explore(rng: np.random.Generator, trials: int = 300) -> None:
    """BFS first move reaches a nearest unvisited room along a shortest remembered path."""
    n = 4
    vocab, room_ids = _grid_vocab(n)
    wall, agent, at = vocab.entity(WALL), vocab.entity(AGENT), vocab.relation(AT_LOCATION)
    for trial in range(trials):
        now = 20
        memory: list[MemoryItem] = []
        for room in range(n * n):
            r, c = divmod(room, n)
            for d in DIRECTIONS:
                if rng.random() < 0.3:
                    continue
                dr, dc = _STEP[d]
                rr, cc = r + dr, c + dc
                inside = 0 <= rr < n and 0 <= cc < n
                tail = room_ids[rr * n + cc] if inside and rng.random() < 0.8 else wall
                memory.append(_random_item(rng, Triple(room_ids[room], vocab.relation(d), tail), now))
                if rng.random() < 0.3:
                    # conflicting memory of the same passage
                    other = wall if tail != wall else (room_ids[rr * n + cc] if inside else wall)
                    memory.append(_random_item(rng, Triple(room_ids[room], vocab.relation(d), other), now))
        for room in rng.choice(n * n, size=int(rng.integers(1, n * n)), replace=False):
            memory.append(_random_item(rng, Triple(agent, at, room_ids[int(room)]), now))
        order = rng.permutation(len(memory))
        memory = [memory[i] for i in order]
        start = room_ids[int(rng.integers(n * n))]

        # independent conflict resolution and distances
        edges: dict[int, dict[str, int]] = {}
        for d in DIRECTIONS:
            rel = vocab.relation(d)
            for room in room_ids:
                rows = [(m.annotations.last_accessed, m.annotations.time_added, pos, m.triple.tail)
                        for pos, m in enumerate(memory) if m.triple.head == room and m.triple.relation == rel]
                if rows:
                    edges.setdefault(room, {})[d] = max(rows)[3]
        visited = {m.triple.tail for m in memory if m.triple.head == agent}

        def dist_from(src: int) -> dict[int, int]:
            dist = {src: 0}
            frontier = deque([src])
            while frontier:
                u = frontier.popleft()
                for v in edges.get(u, {}).values():
                    if v != wall and v not in dist:
                        dist[v] = dist[u] + 1
                        frontier.append(v)
            return dist

        dist = dist_from(start)
        targets = [v for v in dist if v not in visited and v != start]
        got = bfs_first_move(build_memory_map(memory, vocab), start)
        if not targets:
            _expect(got is None, f"trial {trial}: expected no target, got {got}")
            continue
        _expect(got is not None, f"trial {trial}: reachable unvisited rooms {targets} missed")
        direction, target = got
        best = min(dist[v] for v in targets)
        _expect(target in targets and dist[target] == best,
                f"trial {trial}: target {target} at distance {dist.get(target)}, nearest is {best}")
        step_to = edges[start][direction]
        _expect(step_to != wall and dist_from(step_to).get(target) == best - 1,
                f"trial {trial}: first move {direction} is not on a shortest path")


# ---------------------------------------------------------------------- #
# Learning
# ---------------------------------------------------------------------- #

def check_epsilon() -> None:
    _expect(epsilon_at(0) == 1.0, "epsilon_at(0) != 1.0")
    _expect(epsilon_at(10_000) == 0.01 and epsilon_at(25_000) == 0.01, "epsilon does not end at 0.01")
    values = [epsilon_at(i) for i in range(0, 12_000, 7)]
    _expect(all(a >= b for a, b in zip(values, values[1:])), "epsilon schedule is not monotone")


def _toy_state(rng: np.random.Generator, vocab: Vocabulary, n: int, now: int) -> MemoryState:
    ents = len(vocab.entities)
    triples = list(dict.fromkeys(
        Triple(int(rng.integers(ents)), int(rng.integers(len(vocab.relations))), int(rng.integers(ents)))
        for _ in range(n)
    ))
    return MemoryState(tuple(MemoryItem(t, TemporalAnnotations.fresh(now)) for t in triples), (), now)


def check_td(rng: np.random.Generator, trials: int = 20) -> None:
    vocab = Vocabulary.for_world([f"r{i}" for i in range(4)], ["a", "b"])
    net = TransferQNetwork(len(vocab.entities), len(vocab.relations), dim=4, num_bases=2, hidden=4,
                           seed=int(rng.integers(1000)), dtype="float64")
    for trial in range(trials):
        batch = []
        for b in range(4):
            s = _toy_state(rng, vocab, int(rng.integers(1, 7)), b)
            s2 = _toy_state(rng, vocab, int(rng.integers(1, 7)), b + 1)
            acts = tuple(int(a) for a in rng.integers(0, 2, len(s.short)))
            batch.append(Transition(s, acts, float(rng.integers(2)), s2, bool(rng.random() < 0.3)))
        kw = dict(head="local", graph_mode="stm_only", horizon=100)
        double = td_targets(batch, net, net, 0.95, double_dqn=True, **kw)
        plain = td_targets(batch, net, net, 0.95, double_dqn=False, **kw)
        for tr, a, b in zip(batch, double, plain):
            _expect(a.matched == min(len(tr.state.short), len(tr.next_state.short)),
                    f"trial {trial}: matched {a.matched} pairs")
            _expect(torch.equal(a.y, b.y), f"trial {trial}: double and max targets differ with online == target")
            if tr.done:
                _expect(bool(torch.all(a.y == tr.reward)), f"trial {trial}: terminal target differs from reward")


def check_gradient_flow(rng: np.random.Generator) -> None:
    vocab = Vocabulary.for_world(["r0", "r1", "r2"], ["a", "b"])
    state = _toy_state(rng, vocab, 4, 3)
    graph = build_graph_view(state.short, state.long, "stm_only", state.now, 100)
    for kind in ("gcn", "rgcn", "stare_lite"):
        net = TransferQNetwork(len(vocab.entities), len(vocab.relations), kind=kind, dim=3, layers=2,
                               num_bases=2, hidden=3, seed=int(rng.integers(1000)), dtype="float64")
        batch = tensorize(graph, state.short, len(vocab.entities), len(vocab.relations), torch.float64)
        for head in ("local", "global"):
            try:
                check_gradients(net, batch, head=head)
            except RuntimeError as exc:
                raise CheckFailed(f"{kind}/{head}: {exc}") from exc


# ---------------------------------------------------------------------- #

CHECKS: dict[str, Callable[[np.random.Generator], None]] = {
    "eviction_and_capacity": check_eviction,
    "qa_oracle":             check_qa,
    "explore_oracle":        check_explore,
    "epsilon_schedule":      lambda rng: check_epsilon(),
    "td_arithmetic":         check_td,
    "gradient_check":        check_gradient_flow,
}


def run_selfcheck(seed: int = 0, names: list[str] | None = None) -> list[CheckResult]:
    results = []
    for name, check in CHECKS.items():
        if names and name not in names:
            continue
        rng = np.random.default_rng(seed)
        try:
            check(rng)
        except CheckFailed as exc:
            results.append(CheckResult(name, False, str(exc)))
            logger.info("%s: FAIL (%s)", name, exc)
            continue
        results.append(CheckResult(name, True))
        logger.info("%s: ok", name)
    return results
