from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from ..memory.store import LongTermStore, ShortTermBuffer, touch_on_recall
from ..model.triple import MemoryItem


class QaKind(str, Enum):
    MRA = "mra"   # time_added
    MRU = "mru"   # last_accessed
    MFU = "mfu"   # num_recalled


def qa_key(kind: QaKind | str, item: MemoryItem, order: int) -> tuple[int, int, int]:
    """Sort key, larger is better: (policy key, time_added, insertion order)."""
    kind = QaKind(kind)
    ann = item.annotations
    primary = {
        QaKind.MRA: ann.time_added,
        QaKind.MRU: ann.last_accessed,
        QaKind.MFU: ann.num_recalled,
    }[kind]
    return (primary, ann.time_added, order)


def select_answer(
    candidates: Sequence[MemoryItem], kind: QaKind | str,
) -> int | None:
    """Index of the top-ranked candidate; candidates are in insertion order."""
    if not candidates:
        return None
    return max(range(len(candidates)), key=lambda i: qa_key(kind, candidates[i], i))


@dataclass(frozen=True)
class QaAnswer:
    answer:   int
    recalled: MemoryItem | None


def answer_query(
    short: ShortTermBuffer,
    long: LongTermStore,
    head: int,
    relation: int,
    kind: QaKind | str,
    now: int,
    unknown: int,
) -> QaAnswer:
    """
    Answer (head, relation, ?) from short-term and long-term memory.

    Candidates are ordered long-term (insertion order) then short-term
    (buffer order); that position is the last tie-break. The winning item
    is touched in place in whichever tier holds it. A short-term winner
    whose triple is also stored long-term touches the long-term copy too,
    since the short-term copy is gone after the next observation. With no
    candidate the answer is the unknown entity.
    """
    pool: list[tuple[str, int, MemoryItem]] = []
    for item in long:
        if item.triple.head == head and item.triple.relation == relation:
            pool.append(("long", -1, item))
    for idx, item in enumerate(short.items):
        if item.triple.head == head and item.triple.relation == relation:
            pool.append(("short", idx, item))

    best = select_answer([item for _, _, item in pool], kind)
    if best is None:
        return QaAnswer(answer=unknown, recalled=None)

    tier, idx, item = pool[best]
    touched = touch_on_recall(item, now)
    if tier == "long":
        long.replace(touched)
    else:
        short.items[idx] = touched
        stored = long.get(item.triple)
        if stored is not None:
            long.replace(touch_on_recall(stored, now))
    return QaAnswer(answer=item.triple.tail, recalled=touched)
