from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

from ..errors import UsageError
from ..model.triple import MemoryItem, TemporalAnnotations, Triple

logger = logging.getLogger(__name__)

DROP = 0
KEEP = 1


class EvictionPolicy(str, Enum):
    FIFO = "fifo"   # oldest insertion
    LRU  = "lru"    # minimum last_accessed
    LFU  = "lfu"    # minimum num_recalled


@dataclass
class ShortTermBuffer:
    """This step's observed triples, in emission order. Rebuilt every step."""

    items: list[MemoryItem] = field(default_factory=list)
    step:  int = 0

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[MemoryItem]:
        return iter(self.items)


@dataclass(frozen=True)
class MemoryState:
    """Snapshot M_t = (short-term items, long-term items) at step now."""

    short: tuple[MemoryItem, ...]
    long:  tuple[MemoryItem, ...]
    now:   int


class LongTermStore:
    """
    Capacity-limited annotated triple store; at most one item per triple.

    Iteration follows insertion order. Every item carries the value of a
    monotone insertion counter used for FIFO and for eviction tie-breaks.
    """

    def __init__(self, capacity: int = 128) -> None:
        if capacity < 1:
            raise UsageError(f"Long-term capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.insertion_counter = 0
        self._items: dict[Triple, MemoryItem] = {}
        self._inserted: dict[Triple, int] = {}

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, triple: object) -> bool:
        return triple in self._items

    def __iter__(self) -> Iterator[MemoryItem]:
        return iter(list(self._items.values()))

    def items(self) -> list[MemoryItem]:
        return list(self._items.values())

    def get(self, triple: Triple) -> MemoryItem | None:
        return self._items.get(triple)

    def insertion_of(self, triple: Triple) -> int:
        return self._inserted[triple]

    def insert(self, item: MemoryItem) -> int:
        """Add a new triple without capacity handling; returns its insertion counter."""
        if item.triple in self._items:
            raise UsageError(f"Triple {item.triple} is already stored; refresh it instead")
        counter = self.insertion_counter
        self.insertion_counter += 1
        self._items[item.triple] = item
        self._inserted[item.triple] = counter
        return counter

    def replace(self, item: MemoryItem) -> None:
        """Swap in new annotations for a stored triple, keeping its insertion counter."""
        if item.triple not in self._items:
            raise UsageError(f"Triple {item.triple} is not stored")
        self._items[item.triple] = item

    def remove(self, triple: Triple) -> MemoryItem:
        item = self._items.pop(triple)
        del self._inserted[triple]
        return item

    def snapshot(self) -> tuple[MemoryItem, ...]:
        return tuple(self._items.values())

    def copy(self) -> "LongTermStore":
        clone = LongTermStore(self.capacity)
        clone.insertion_counter = self.insertion_counter
        clone._items = dict(self._items)
        clone._inserted = dict(self._inserted)
        return clone


def refresh_short_term(triples: Iterable[Triple], now: int) -> ShortTermBuffer:
    """One fresh item per observed triple, order preserved."""
    ann = TemporalAnnotations.fresh(now)
    return ShortTermBuffer(items=[MemoryItem(t, ann) for t in triples], step=now)


def eviction_key(policy: EvictionPolicy | str, item: MemoryItem, insertion: int) -> tuple[int, int]:
    policy = EvictionPolicy(policy)
    if policy is EvictionPolicy.FIFO:
        return (insertion, insertion)
    if policy is EvictionPolicy.LRU:
        return (item.annotations.last_accessed, insertion)
    return (item.annotations.num_recalled, insertion)


def evict_one(
    store: LongTermStore, policy: EvictionPolicy | str,
) -> tuple[LongTermStore, MemoryItem]:
    """Remove the argmin of the policy key; ties go to the smallest insertion counter."""
    if not len(store):
        raise UsageError("Cannot evict from an empty long-term store")
    victim = min(
        store.items(),
        key=lambda m: eviction_key(policy, m, store.insertion_of(m.triple)),
    )
    store.remove(victim.triple)
    return store, victim


def apply_transfer(
    short: ShortTermBuffer | Sequence[MemoryItem],
    actions: Sequence[int],
    store: LongTermStore,
    eviction: EvictionPolicy | str,
    now: int,
) -> LongTermStore:
    """
    Execute keep/drop decisions in buffer order.

    A kept triple already in the store is refreshed (last_accessed = now);
    a new one is inserted, and one item is evicted right after any
    insertion that takes the store over capacity.
    """
    items = short.items if isinstance(short, ShortTermBuffer) else list(short)
    if len(actions) != len(items):
        raise UsageError(
            f"Got {len(actions)} transfer actions for {len(items)} short-term items"
        )
    for item, action in zip(items, actions):
        if action not in (DROP, KEEP):
            raise UsageError(f"Transfer action must be 0 (drop) or 1 (keep), got {action!r}")
        if action == DROP:
            continue
        existing = store.get(item.triple)
        if existing is not None:
            store.replace(existing.accessed(now))
            continue
        store.insert(item)
        if len(store) > store.capacity:
            _, victim = evict_one(store, eviction)
            logger.debug("evicted %s (%s) at step %d", victim.triple, EvictionPolicy(eviction).value, now)
    return store


def touch_on_recall(item: MemoryItem, now: int) -> MemoryItem:
    """num_recalled += 1 and last_accessed = now for the item that answered a query."""
    return item.recalled(now)
