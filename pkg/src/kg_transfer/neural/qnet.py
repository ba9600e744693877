from __future__ import annotations

import logging
import math

import torch
from torch import nn

from ..errors import UsageError
from .encoders import GraphEncoder, get_encoder
from .tensorize import GraphBatch

logger = logging.getLogger(__name__)

DTYPES: dict[str, torch.dtype] = {"float32": torch.float32, "float64": torch.float64}


class TransferQNetwork(nn.Module):
    """
    Shared-parameter per-item Q function over memory graphs.

    Entity and relation tables feed a graph encoder; each short-term item
    is represented by [h_head || h_tail] and scored by a one-hidden-layer
    MLP into (Q_drop, Q_keep).
    """

    def __init__(
        self,
        num_entities: int,
        num_relations: int,
        kind: str = "gcn",
        dim: int = 16,
        layers: int = 2,
        num_bases: int = 20,
        hidden: int = 16,
        seed: int = 0,
        dtype: torch.dtype | str = torch.float32,
    ) -> None:
        super().__init__()
        self.kind = kind
        self.dim = dim
        self.num_entities = num_entities
        self.num_relations = num_relations
        self.hparams = {
            "kind": kind, "dim": dim, "layers": layers, "num_bases": num_bases,
            "hidden": hidden, "seed": seed,
        }
        self.entity_embeddings = nn.Embedding(num_entities, dim)
        self.relation_embeddings = nn.Embedding(num_relations, dim)
        self.encoder: GraphEncoder = get_encoder(kind, dim, layers, num_relations, num_bases=num_bases)
        self.head = nn.Sequential(
            nn.Linear(2 * dim, hidden),
            nn.ReLU(),
            nn.Linear(hidden, 2),
        )
        dtype = DTYPES[dtype] if isinstance(dtype, str) else dtype
        self.to(dtype)
        self.reset_parameters(seed)

    @property
    def dtype(self) -> torch.dtype:
        return self.entity_embeddings.weight.dtype

    def reset_parameters(self, seed: int) -> None:
        """uniform(-1/sqrt(d), 1/sqrt(d)) for every weight, bias and embedding."""
        gen = torch.Generator().manual_seed(seed)
        bound = 1.0 / math.sqrt(self.dim)
        with torch.no_grad():
            for param in self.parameters():
                param.uniform_(-bound, bound, generator=gen)

    # ------------------------------------------------------------------ #
    # Forward paths
    # ------------------------------------------------------------------ #

    def encode(self, batch: GraphBatch) -> tuple[torch.Tensor, torch.Tensor]:
        """(node embeddings |V|xd, relation embeddings |R|xd) after L layers."""
        h = self.entity_embeddings(batch.node_entities)
        r = self.relation_embeddings.weight
        return self.encoder(h, r, batch)

    def item_representations(self, batch: GraphBatch) -> torch.Tensor:
        h, _ = self.encode(batch)
        return torch.cat([h[batch.item_index[:, 0]], h[batch.item_index[:, 1]]], dim=-1)

    def q_values_local(self, batch: GraphBatch) -> torch.Tensor:
        """n x 2; column 0 is drop, column 1 is keep."""
        if batch.num_items == 0:
            return torch.zeros((0, 2), dtype=self.dtype)
        return self.head(self.item_representations(batch))

    def q_values_global(self, batch: GraphBatch) -> torch.Tensor:
        """One pooled 2-vector per graph (num_graphs x 2)."""
        empty = [g for g, n in enumerate(batch.items_per_graph) if n == 0]
        if empty:
            raise UsageError(f"Global Q needs at least one short-term item (empty graphs: {empty})")
        z = self.item_representations(batch)
        pooled = z.new_zeros((batch.num_graphs, z.shape[-1])).index_add(0, batch.item_graph, z)
        counts = torch.tensor(batch.items_per_graph, dtype=z.dtype).unsqueeze(-1)
        return self.head(pooled / counts)

    def forward(self, batch: GraphBatch, head: str = "local") -> torch.Tensor:
        return self.q_values(batch, head)

    def q_values(self, batch: GraphBatch, head: str) -> torch.Tensor:
        """Per-item rows for either head; global rows are broadcast to every item."""
        if head == "local":
            return self.q_values_local(batch)
        if batch.num_items == 0:
            return torch.zeros((0, 2), dtype=self.dtype)
        return self.q_values_global(batch)[batch.item_graph]


def parameter_count(network: nn.Module) -> int:
    return sum(p.numel() for p in network.parameters() if p.requires_grad)


def compute_gradients(loss: torch.Tensor, network: nn.Module) -> dict[str, torch.Tensor]:
    """Reverse-mode gradients of a scalar loss for every named parameter (zeros if unused)."""
    names, params = zip(*network.named_parameters())
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    return {
        name: torch.zeros_like(p) if g is None else g
        for name, p, g in zip(names, params, grads)
    }
