from __future__ import annotations


def epsilon_at(
    iteration: int,
    epsilon_max: float = 1.0,
    epsilon_min: float = 0.01,
    decay_iters: int = 10_000,
) -> float:
    """Linear decay from epsilon_max at 0 to epsilon_min at decay_iters, flat afterwards."""
    if iteration < 0:
        raise ValueError(f"iteration must be non-negative, got {iteration}")
    if iteration >= decay_iters:
        return epsilon_min
    return epsilon_max - (epsilon_max - epsilon_min) * iteration / decay_iters
