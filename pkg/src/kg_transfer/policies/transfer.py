from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..memory.store import DROP, KEEP, LongTermStore, ShortTermBuffer


class TransferPolicy(abc.ABC):
    """
    Per-item keep/drop decisions for one short-term buffer.

    Subclasses implement decide(); the surrounding agent loop is the same
    for every policy, learned or symbolic.
    """

    NAME: str = "base"

    @abc.abstractmethod
    def decide(
        self, short: ShortTermBuffer, long: LongTermStore, rng: np.random.Generator,
    ) -> list[int]:
        """One action (0 drop, 1 keep) per short-term item, in buffer order."""


class AlwaysTransfer(TransferPolicy):
    NAME = "always"

    def decide(
        self, short: ShortTermBuffer, long: LongTermStore, rng: np.random.Generator,
    ) -> list[int]:
        return [KEEP] * len(short)


class NovelOnlyTransfer(TransferPolicy):
    NAME = "novel"

    def decide(
        self, short: ShortTermBuffer, long: LongTermStore, rng: np.random.Generator,
    ) -> list[int]:
        return [DROP if item.triple in long else KEEP for item in short]


class RandomTransfer(TransferPolicy):
    NAME = "random"

    def __init__(self, p: float = 0.5) -> None:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Random transfer probability must lie in [0, 1], got {p}")
        self.p = p

    def decide(
        self, short: ShortTermBuffer, long: LongTermStore, rng: np.random.Generator,
    ) -> list[int]:
        return [KEEP if u < self.p else DROP for u in rng.random(len(short))]


TRANSFER_REGISTRY: dict[str, type[TransferPolicy]] = {
    "always": AlwaysTransfer,
    "novel":  NovelOnlyTransfer,
    "random": RandomTransfer,
}


def get_transfer_policy(name: str, p: float = 0.5) -> TransferPolicy:
    """Return an instantiated symbolic transfer baseline by config name."""
    key = name.lower()
    if key not in TRANSFER_REGISTRY:
        raise ValueError(
            f"Unknown transfer baseline '{name}'. "
            f"Valid options: {sorted(TRANSFER_REGISTRY)}"
        )
    if key == "random":
        return RandomTransfer(p)
    return TRANSFER_REGISTRY[key]()


@dataclass(frozen=True)
class TransferBaseline:
    kind: Literal["always", "novel", "random"]
    p:    float = 0.5


def baseline_transfer(
    short: ShortTermBuffer,
    long: LongTermStore,
    baseline: TransferBaseline,
    rng: np.random.Generator,
) -> list[int]:
    return get_transfer_policy(baseline.kind, baseline.p).decide(short, long, rng)
