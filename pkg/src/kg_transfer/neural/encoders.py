from __future__ import annotations

import abc

import torch
from torch import nn
from torch.nn import functional as F

from .tensorize import GraphBatch


def scatter_mean(src: torch.Tensor, index: torch.Tensor, size: int) -> torch.Tensor:
    """Mean of src rows grouped by index; empty groups give zeros."""
    out = src.new_zeros((size, src.shape[-1])).index_add(0, index, src)
    count = src.new_zeros(size).index_add(0, index, src.new_ones(index.shape[0]))
    return out / count.clamp(min=1.0).unsqueeze(-1)


def _undirected(batch: GraphBatch) -> tuple[torch.Tensor, torch.Tensor]:
    """(src, dst) over both edge directions plus one self-loop per node."""
    heads, tails = batch.edge_index
    loops = torch.arange(batch.num_nodes)
    return torch.cat([heads, tails, loops]), torch.cat([tails, heads, loops])


class GraphEncoder(nn.Module, abc.ABC):
    """
    L rounds of message passing over node states, with relation states
    advanced by a per-layer linear map + ReLU.

    Subclasses implement _propagate for one layer.
    """

    KIND: str = "base"

    def __init__(self, dim: int, layers: int, num_relations: int, **kwargs) -> None:
        super().__init__()
        self.dim = dim
        self.layers = layers
        self.num_relations = num_relations
        self.relation_layers = nn.ModuleList(nn.Linear(dim, dim) for _ in range(layers))

    def forward(
        self, h: torch.Tensor, r: torch.Tensor, batch: GraphBatch,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        for layer in range(self.layers):
            h_next = self._propagate(layer, h, r, batch)
            r = F.relu(self.relation_layers[layer](r))
            h = h_next
        return h, r

    @abc.abstractmethod
    def _propagate(
        self, layer: int, h: torch.Tensor, r: torch.Tensor, batch: GraphBatch,
    ) -> torch.Tensor:
        """Node states after one layer."""


class GCNEncoder(GraphEncoder):
    """Mean over undirected neighbours and self, then linear + ReLU."""

    KIND = "gcn"

    def __init__(self, dim, layers, num_relations, **kwargs):
        super().__init__(dim, layers, num_relations)
        self.node_layers = nn.ModuleList(nn.Linear(dim, dim) for _ in range(layers))

    def _propagate(self, layer, h, r, batch):
        src, dst = _undirected(batch)
        agg = scatter_mean(h[src], dst, batch.num_nodes)
        return F.relu(self.node_layers[layer](agg))


class RGCNEncoder(GraphEncoder):
    """
    Relation-specific transforms from a shared basis.

    Inverse edges get their own relation slots (2R types). Messages are
    averaged per (node, relation type), summed over types, and added to a
    self transform.
    """

    KIND = "rgcn"

    def __init__(self, dim, layers, num_relations, num_bases: int = 20, **kwargs):
        super().__init__(dim, layers, num_relations)
        self.num_bases = num_bases
        self.num_types = 2 * num_relations
        self.bases = nn.ParameterList(
            nn.Parameter(torch.empty(num_bases, dim, dim)) for _ in range(layers)
        )
        self.coefficients = nn.ParameterList(
            nn.Parameter(torch.empty(self.num_types, num_bases)) for _ in range(layers)
        )
        self.self_layers = nn.ModuleList(nn.Linear(dim, dim) for _ in range(layers))

    def _propagate(self, layer, h, r, batch):
        heads, tails = batch.edge_index
        src = torch.cat([heads, tails])
        dst = torch.cat([tails, heads])
        etype = torch.cat([batch.edge_type, batch.edge_type + self.num_relations])

        weights = torch.einsum("tb,bij->tij", self.coefficients[layer], self.bases[layer])
        msg = torch.bmm(h[src].unsqueeze(1), weights[etype]).squeeze(1)

        # 1 / |N_r(v)| per message
        group = dst * self.num_types + etype
        count = h.new_zeros(batch.num_nodes * self.num_types).index_add(
            0, group, h.new_ones(group.shape[0])
        )
        msg = msg / count[group].unsqueeze(-1)

        agg = h.new_zeros(h.shape).index_add(0, dst, msg)
        return F.relu(agg + self.self_layers[layer](h))


class StarELiteEncoder(GraphEncoder):
    """
    Qualifier-aware messages: each edge's relation vector gets a learned
    linear map of its annotation features added in, is composed with the
    neighbour state by elementwise product, then GCN-style mean + linear.
    """

    KIND = "stare_lite"

    def __init__(self, dim, layers, num_relations, **kwargs):
        super().__init__(dim, layers, num_relations)
        self.qualifier_layers = nn.ModuleList(nn.Linear(3, dim) for _ in range(layers))
        self.node_layers = nn.ModuleList(nn.Linear(dim, dim) for _ in range(layers))

    def _propagate(self, layer, h, r, batch):
        heads, tails = batch.edge_index
        rel = r[batch.edge_type] + self.qualifier_layers[layer](batch.edge_features)
        loops = torch.arange(batch.num_nodes)
        msg = torch.cat([h[heads] * rel, h[tails] * rel, h])
        dst = torch.cat([tails, heads, loops])
        agg = scatter_mean(msg, dst, batch.num_nodes)
        return F.relu(self.node_layers[layer](agg))


ENCODER_REGISTRY: dict[str, type[GraphEncoder]] = {
    "gcn":        GCNEncoder,
    "rgcn":       RGCNEncoder,
    "stare_lite": StarELiteEncoder,
}


def get_encoder(kind: str, dim: int, layers: int, num_relations: int, **kwargs) -> GraphEncoder:
    key = kind.lower()
    if key not in ENCODER_REGISTRY:
        raise ValueError(
            f"Unknown encoder '{kind}'. Valid options: {sorted(ENCODER_REGISTRY)}"
        )
    return ENCODER_REGISTRY[key](dim, layers, num_relations, **kwargs)
