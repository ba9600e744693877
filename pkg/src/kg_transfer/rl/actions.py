from __future__ import annotations

import numpy as np
import torch

from ..errors import UsageError


def select_actions(
    q: torch.Tensor | np.ndarray,
    epsilon: float,
    rng: np.random.Generator,
    n: int | None = None,
) -> list[int]:
    """
    Epsilon-greedy keep/drop actions.

    q of shape n x 2 gives one independent decision per row (local heads).
    q of shape 1 x 2 together with n gives one decision broadcast to all n
    items (global heads). Greedy ties resolve to drop.
    """
    values = q.detach().cpu().numpy() if isinstance(q, torch.Tensor) else np.asarray(q)
    values = values.reshape(-1, 2)
    if n is not None:
        if values.shape[0] != 1:
            raise UsageError(f"Broadcast selection needs a single 2-vector, got shape {values.shape}")
        if n == 0:
            return []
        return [_one(values[0], epsilon, rng)] * n
    return [_one(row, epsilon, rng) for row in values]


def _one(row: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(2))
    return int(np.argmax(row))
