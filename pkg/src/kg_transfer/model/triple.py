from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .vocab import Vocabulary


@dataclass(frozen=True, order=True)
class Triple:
    """(head, relation, tail) over interned ids; equal iff all three ids are equal."""

    head:     int
    relation: int
    tail:     int


@dataclass(frozen=True)
class TemporalAnnotations:
    time_added:    int
    last_accessed: int
    num_recalled:  int = 0

    def __post_init__(self) -> None:
        if self.time_added < 0 or self.num_recalled < 0:
            raise ValueError(f"Annotations must be non-negative: {self}")
        if self.last_accessed < self.time_added:
            raise ValueError(
                f"last_accessed ({self.last_accessed}) precedes time_added ({self.time_added})"
            )

    @classmethod
    def fresh(cls, now: int) -> "TemporalAnnotations":
        return cls(time_added=now, last_accessed=now, num_recalled=0)


@dataclass(frozen=True)
class MemoryItem:
    """A triple plus its temporal annotations; the unit of memory and of transfer decisions."""

    triple:      Triple
    annotations: TemporalAnnotations

    def accessed(self, now: int) -> "MemoryItem":
        ann = self.annotations
        return replace(self, annotations=replace(ann, last_accessed=max(now, ann.last_accessed)))

    def recalled(self, now: int) -> "MemoryItem":
        ann = self.annotations
        return replace(
            self,
            annotations=TemporalAnnotations(
                time_added=ann.time_added,
                last_accessed=max(now, ann.time_added),
                num_recalled=ann.num_recalled + 1,
            ),
        )


# ------------------------------------------------------------------ #
# JSON form: {"h": label, "r": label, "t": label, "ann": {...}}
# ------------------------------------------------------------------ #

def triple_to_dict(triple: Triple, vocab: Vocabulary) -> dict[str, str]:
    return {
        "h": vocab.entities.label_of(triple.head),
        "r": vocab.relations.label_of(triple.relation),
        "t": vocab.entities.label_of(triple.tail),
    }


def triple_from_dict(data: dict[str, Any], vocab: Vocabulary) -> Triple:
    return Triple(
        head=vocab.entity(data["h"]),
        relation=vocab.relation(data["r"]),
        tail=vocab.entity(data["t"]),
    )


def item_to_dict(item: MemoryItem, vocab: Vocabulary) -> dict[str, Any]:
    ann = item.annotations
    return {
        **triple_to_dict(item.triple, vocab),
        "ann": {
            "time_added":    ann.time_added,
            "last_accessed": ann.last_accessed,
            "num_recalled":  ann.num_recalled,
        },
    }


def item_from_dict(data: dict[str, Any], vocab: Vocabulary) -> MemoryItem:
    ann = data.get("ann") or {}
    return MemoryItem(
        triple=triple_from_dict(data, vocab),
        annotations=TemporalAnnotations(
            time_added=int(ann.get("time_added", 0)),
            last_accessed=int(ann.get("last_accessed", ann.get("time_added", 0))),
            num_recalled=int(ann.get("num_recalled", 0)),
        ),
    )
