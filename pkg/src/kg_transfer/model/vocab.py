from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import VocabularyError

AGENT = "agent"
WALL = "wall"
UNKNOWN = "unknown"

AT_LOCATION = "at_location"
DIRECTIONS: tuple[str, ...] = ("north", "south", "east", "west")


@dataclass
class Interner:
    """Bijective label <-> dense integer id mapping."""

    kind:    str
    _labels: list[str]      = field(default_factory=list)
    _ids:    dict[str, int] = field(default_factory=dict)

    def intern(self, label: str) -> int:
        if not label:
            raise VocabularyError(f"Cannot intern an empty {self.kind} label")
        idx = self._ids.get(label)
        if idx is None:
            idx = len(self._labels)
            self._labels.append(label)
            self._ids[label] = idx
        return idx

    def id_of(self, label: str) -> int:
        try:
            return self._ids[label]
        except KeyError:
            raise VocabularyError(f"Unknown {self.kind} '{label}'") from None

    def label_of(self, idx: int) -> str:
        if not 0 <= idx < len(self._labels):
            raise VocabularyError(f"Unknown {self.kind} id {idx}")
        return self._labels[idx]

    def __contains__(self, label: object) -> bool:
        return label in self._ids

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> list[str]:
        return list(self._labels)


@dataclass
class Vocabulary:
    """
    Entities and relations of one run.

    Built once at startup, then only read. Environment, memory and network
    all share the same instance so ids agree everywhere.
    """

    entities:  Interner = field(default_factory=lambda: Interner("entity"))
    relations: Interner = field(default_factory=lambda: Interner("relation"))

    @classmethod
    def build(cls, entity_labels: Iterable[str], relation_labels: Iterable[str]) -> "Vocabulary":
        vocab = cls()
        for label in entity_labels:
            vocab.entities.intern(label)
        for label in relation_labels:
            vocab.relations.intern(label)
        return vocab

    @classmethod
    def for_world(cls, rooms: Iterable[str], objects: Iterable[str]) -> "Vocabulary":
        """Agent, wall and unknown first, then rooms and objects; fixed relation set."""
        return cls.build(
            [AGENT, WALL, UNKNOWN, *rooms, *objects],
            [AT_LOCATION, *DIRECTIONS],
        )

    def entity(self, label: str) -> int:
        return self.entities.id_of(label)

    def relation(self, label: str) -> int:
        return self.relations.id_of(label)

    def to_dict(self) -> dict[str, list[str]]:
        return {"entities": self.entities.labels, "relations": self.relations.labels}

    @classmethod
    def from_dict(cls, data: dict[str, list[str]]) -> "Vocabulary":
        return cls.build(data["entities"], data["relations"])
