from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .triple import MemoryItem, Triple

RECALL_CAP = 10


class GraphMode(str, Enum):
    """Which memory tiers feed the encoder."""
    STM_ONLY = "stm_only"
    FULL     = "full"


class EdgeSource(str, Enum):
    SHORT_TERM = "short_term"
    LONG_TERM  = "long_term"


@dataclass(frozen=True)
class GraphEdge:
    triple:   Triple
    features: tuple[float, float, float]   # (age, recency, recall), normalized
    source:   EdgeSource


@dataclass(frozen=True)
class GraphView:
    """
    Encoder input G_t: nodes, annotated edges and their memory tier.

    nodes is kept sorted so tensorization is deterministic.
    """

    nodes: tuple[int, ...]
    edges: tuple[GraphEdge, ...]

    @property
    def relations(self) -> set[int]:
        return {e.triple.relation for e in self.edges}

    def count(self, source: EdgeSource) -> int:
        return sum(1 for e in self.edges if e.source is source)


def annotation_features(
    item: MemoryItem, now: int, horizon: int, recall_cap: int = RECALL_CAP,
) -> tuple[float, float, float]:
    ann = item.annotations
    return (
        (now - ann.time_added) / horizon,
        (now - ann.last_accessed) / horizon,
        min(ann.num_recalled, recall_cap) / recall_cap,
    )


def build_graph_view(
    short: Sequence[MemoryItem],
    long: Sequence[MemoryItem],
    mode: GraphMode | str,
    now: int,
    horizon: int,
) -> GraphView:
    """
    Convert a memory state into the encoder's graph.

    stm_only keeps short-term edges only; full adds every long-term edge.
    Short-term edges come first, in buffer order.
    """
    mode = GraphMode(mode)
    sources: list[tuple[MemoryItem, EdgeSource]] = [(m, EdgeSource.SHORT_TERM) for m in short]
    if mode is GraphMode.FULL:
        sources.extend((m, EdgeSource.LONG_TERM) for m in long)

    nodes: set[int] = set()
    edges: list[GraphEdge] = []
    for item, source in sources:
        nodes.add(item.triple.head)
        nodes.add(item.triple.tail)
        edges.append(GraphEdge(
            triple=item.triple,
            features=annotation_features(item, now, horizon),
            source=source,
        ))
    return GraphView(nodes=tuple(sorted(nodes)), edges=tuple(edges))
