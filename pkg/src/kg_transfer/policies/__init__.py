from .qa import QaAnswer, QaKind, answer_query, qa_key, select_answer
from .explore import MemoryMap, bfs_first_move, build_memory_map, explore_action
from .transfer import (
    TRANSFER_REGISTRY, AlwaysTransfer, NovelOnlyTransfer, RandomTransfer,
    TransferBaseline, TransferPolicy, baseline_transfer, get_transfer_policy,
)
from .agent import MemoryAgent

__all__ = [
    "QaAnswer",
    "QaKind",
    "answer_query",
    "qa_key",
    "select_answer",
    "MemoryMap",
    "bfs_first_move",
    "build_memory_map",
    "explore_action",
    "TRANSFER_REGISTRY",
    "AlwaysTransfer",
    "NovelOnlyTransfer",
    "RandomTransfer",
    "TransferBaseline",
    "TransferPolicy",
    "baseline_transfer",
    "get_transfer_policy",
    "MemoryAgent",
]
