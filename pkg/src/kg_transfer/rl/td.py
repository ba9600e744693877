from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
import torch

from ..memory.store import MemoryState
from ..model.graph_view import GraphMode, GraphView, build_graph_view
from ..neural.tensorize import GraphBatch, batch_graphs
from .replay import Transition


class QFunction(Protocol):
    num_entities:  int
    num_relations: int

    @property
    def dtype(self) -> torch.dtype: ...

    def q_values(self, batch: GraphBatch, head: str) -> torch.Tensor: ...


@dataclass
class MatchedTerms:
    """Per-transition TD pairs: online estimates q_j and fixed targets y_j."""

    q: torch.Tensor
    y: torch.Tensor

    @property
    def matched(self) -> int:
        return int(self.q.shape[0])


def state_graph(state: MemoryState, mode: GraphMode | str, horizon: int) -> GraphView:
    return build_graph_view(state.short, state.long, mode, state.now, horizon)


def encode_states(
    states: Sequence[MemoryState],
    network: QFunction,
    mode: GraphMode | str,
    horizon: int,
) -> GraphBatch:
    return batch_graphs(
        [(state_graph(s, mode, horizon), s.short) for s in states],
        network.num_entities, network.num_relations, network.dtype,
    )


def _split(q: torch.Tensor, counts: list[int]) -> list[torch.Tensor]:
    return list(torch.split(q, counts, dim=0))


def td_targets(
    batch: Sequence[Transition],
    online: QFunction,
    target: QFunction,
    gamma: float,
    *,
    head: str,
    graph_mode: GraphMode | str,
    horizon: int,
    double_dqn: bool = True,
    reshuffle_rng: np.random.Generator | None = None,
) -> list[MatchedTerms]:
    """
    Matched per-item TD targets for a replay batch.

    Transition b contributes l_b = min(|short_b|, |short_b+1|) pairs,
    matched index-wise in stored emission order (or after an independent
    permutation of each side when reshuffle_rng is given). With double_dqn
    the online net picks a* at (M_b+1, j) and the target net values it;
    otherwise the target net's max is used. Transitions with l_b = 0 get
    empty terms.
    """
    lengths = [min(len(tr.state.short), len(tr.next_state.short)) for tr in batch]
    active = [b for b, n in enumerate(lengths) if n > 0]
    dtype = online.dtype
    terms = [
        MatchedTerms(q=torch.zeros(0, dtype=dtype), y=torch.zeros(0, dtype=dtype))
        for _ in batch
    ]
    if not active:
        return terms

    cur_batch = encode_states([batch[b].state for b in active], online, graph_mode, horizon)
    next_batch = encode_states([batch[b].next_state for b in active], online, graph_mode, horizon)

    q_cur = _split(online.q_values(cur_batch, head), cur_batch.items_per_graph)
    with torch.no_grad():
        q_next_target = _split(target.q_values(next_batch, head), next_batch.items_per_graph)
        q_next_online = (
            _split(online.q_values(next_batch, head), next_batch.items_per_graph)
            if double_dqn else None
        )

    for k, b in enumerate(active):
        tr = batch[b]
        length = lengths[b]
        if reshuffle_rng is not None:
            idx_cur = torch.as_tensor(reshuffle_rng.permutation(len(tr.state.short))[:length])
            idx_next = torch.as_tensor(reshuffle_rng.permutation(len(tr.next_state.short))[:length])
        else:
            idx_cur = idx_next = torch.arange(length)

        actions = torch.as_tensor(tr.actions, dtype=torch.long)[idx_cur]
        q = q_cur[k][idx_cur].gather(1, actions.unsqueeze(1)).squeeze(1)

        next_values = q_next_target[k][idx_next]
        if q_next_online is not None:
            best = q_next_online[k][idx_next].argmax(dim=1, keepdim=True)
            bootstrap = next_values.gather(1, best).squeeze(1)
        else:
            bootstrap = next_values.max(dim=1).values
        not_done = 0.0 if tr.done else 1.0
        y = tr.reward + gamma * not_done * bootstrap
        terms[b] = MatchedTerms(q=q, y=y.detach())
    return terms


def td_loss(terms: Sequence[MatchedTerms]) -> torch.Tensor | None:
    """Mean over transitions of (1/l_b) sum_j (q_j - y_j)^2; None when no pair exists."""
    per_transition = [((t.q - t.y) ** 2).mean() for t in terms if t.matched > 0]
    if not per_transition:
        return None
    return torch.stack(per_transition).mean()
