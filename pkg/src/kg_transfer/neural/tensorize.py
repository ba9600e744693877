from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import torch

from ..errors import UsageError, VocabularyError
from ..model.graph_view import GraphView
from ..model.triple import MemoryItem


@dataclass
class GraphBatch:
    """
    One or more GraphViews as a disjoint union, plus the items to score.

    Node indices are local to the batch; item_graph maps each item row to
    the graph it came from.
    """

    node_entities: torch.Tensor   # (N,)   entity id per node
    edge_index:    torch.Tensor   # (2, E) head node, tail node
    edge_type:     torch.Tensor   # (E,)   relation id
    edge_features: torch.Tensor   # (E, 3) age, recency, recall
    item_index:    torch.Tensor   # (n, 2) head node, tail node per item
    item_graph:    torch.Tensor   # (n,)
    items_per_graph: list[int]

    @property
    def num_nodes(self) -> int:
        return int(self.node_entities.shape[0])

    @property
    def num_graphs(self) -> int:
        return len(self.items_per_graph)

    @property
    def num_items(self) -> int:
        return int(self.item_index.shape[0])


def batch_graphs(
    pairs: Sequence[tuple[GraphView, Sequence[MemoryItem]]],
    num_entities: int,
    num_relations: int,
    dtype: torch.dtype = torch.float32,
) -> GraphBatch:
    """
    Tensorize (graph, items) pairs into one disjoint-union batch.

    Message passing never crosses components, so encoding the batch equals
    encoding each graph on its own.
    """
    node_entities: list[int] = []
    heads: list[int] = []
    tails: list[int] = []
    types: list[int] = []
    feats: list[tuple[float, float, float]] = []
    item_rows: list[tuple[int, int]] = []
    item_graph: list[int] = []
    counts: list[int] = []

    for g, (graph, items) in enumerate(pairs):
        offset = len(node_entities)
        local = {eid: offset + i for i, eid in enumerate(graph.nodes)}
        for eid in graph.nodes:
            if not 0 <= eid < num_entities:
                raise VocabularyError(f"Entity id {eid} is outside the encoder vocabulary ({num_entities})")
        node_entities.extend(graph.nodes)
        for edge in graph.edges:
            t = edge.triple
            if not 0 <= t.relation < num_relations:
                raise VocabularyError(
                    f"Relation id {t.relation} is outside the encoder vocabulary ({num_relations})"
                )
            heads.append(local[t.head])
            tails.append(local[t.tail])
            types.append(t.relation)
            feats.append(edge.features)
        for item in items:
            t = item.triple
            if t.head not in local or t.tail not in local:
                raise UsageError(f"Item {t} has an endpoint missing from the graph")
            item_rows.append((local[t.head], local[t.tail]))
            item_graph.append(g)
        counts.append(len(items))

    return GraphBatch(
        node_entities=torch.tensor(node_entities, dtype=torch.long),
        edge_index=torch.tensor([heads, tails], dtype=torch.long).reshape(2, -1),
        edge_type=torch.tensor(types, dtype=torch.long),
        edge_features=torch.tensor(feats, dtype=dtype).reshape(-1, 3),
        item_index=torch.tensor(item_rows, dtype=torch.long).reshape(-1, 2),
        item_graph=torch.tensor(item_graph, dtype=torch.long),
        items_per_graph=counts,
    )


def tensorize(
    graph: GraphView,
    items: Sequence[MemoryItem],
    num_entities: int,
    num_relations: int,
    dtype: torch.dtype = torch.float32,
) -> GraphBatch:
    return batch_graphs([(graph, items)], num_entities, num_relations, dtype)
