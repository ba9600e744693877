from .store import (
    DROP, KEEP, EvictionPolicy, LongTermStore, MemoryState, ShortTermBuffer,
    apply_transfer, evict_one, eviction_key, refresh_short_term, touch_on_recall,
)
from .export import memory_state_to_dot, memory_to_dot, store_to_jsonl

__all__ = [
    "DROP",
    "KEEP",
    "EvictionPolicy",
    "LongTermStore",
    "MemoryState",
    "ShortTermBuffer",
    "apply_transfer",
    "evict_one",
    "eviction_key",
    "refresh_short_term",
    "touch_on_recall",
    "memory_state_to_dot",
    "memory_to_dot",
    "store_to_jsonl",
]
