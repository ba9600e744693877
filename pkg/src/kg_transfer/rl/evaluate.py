from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..env.room_env import RoomEnv
from ..errors import UsageError
from ..neural.qnet import TransferQNetwork
from ..policies.transfer import TransferPolicy, get_transfer_policy
from ..schema.config_schema import ExperimentConfig, Split
from .episode import eval_episode_seed, run_episode
from .learned import LearnedTransfer

logger = logging.getLogger(__name__)

EPISODE_COLUMNS = ("split", "seed", "episode", "score")


@dataclass
class EvalResult:
    split:     str
    seed_means: dict[int, float]
    episodes:  list[dict[str, Any]] = field(default_factory=list)
    decisions: list[dict[str, Any]] = field(default_factory=list)
    traces:    list[dict[str, Any]] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(list(self.seed_means.values())))

    @property
    def std(self) -> float:
        """Population standard deviation over per-seed means."""
        return float(np.std(list(self.seed_means.values())))

    def to_dict(self) -> dict[str, Any]:
        return {
            "split": self.split,
            "seeds": sorted(self.seed_means),
            "seed_means": {str(s): m for s, m in sorted(self.seed_means.items())},
            "mean": self.mean,
            "std": self.std,
        }


def make_policy(
    config: ExperimentConfig,
    network: TransferQNetwork | None = None,
) -> TransferPolicy:
    """Greedy learned policy for a trained network, else the configured symbolic baseline."""
    p = config.policies
    if p.transfer == "learned":
        if network is None:
            raise UsageError("policies.transfer='learned' needs a trained network to evaluate")
        return LearnedTransfer(
            network,
            head=config.trainer.head,
            graph_mode=config.trainer.graph_mode,
            horizon=config.world.horizon,
            epsilon=0.0,
        )
    return get_transfer_policy(p.transfer, p.random_p)


def evaluate(
    config: ExperimentConfig,
    split: Split,
    *,
    networks: Mapping[int, TransferQNetwork] | None = None,
    episodes: int | None = None,
    seeds: list[int] | None = None,
    record_decisions: bool = False,
    record_trace: bool = False,
) -> EvalResult:
    """
    Score a transfer policy on one query split.

    Each seed plays `episodes` episodes with decisions taken greedily
    (learned) or by the baseline rule; its score is the mean episode score.
    Learned policies take the network trained for that seed.
    """
    episodes = config.evaluation.episodes if episodes is None else episodes
    seeds = config.seeds if seeds is None else seeds
    env = RoomEnv(config.world.model_copy(update={"query_split": split}))
    result = EvalResult(split=split, seed_means={})

    for seed in seeds:
        network = None
        if config.policies.transfer == "learned":
            if networks is None or seed not in networks:
                raise UsageError(f"No trained network for seed {seed}")
            network = networks[seed]
        policy = make_policy(config, network)
        scores = []
        for episode in range(episodes):
            played = run_episode(
                env, policy, config.policies,
                eval_episode_seed(seed, episode), episode,
                record_decisions=record_decisions,
                record_trace=record_trace,
            )
            scores.append(played.score)
            result.episodes.append({"split": split, "seed": seed, "episode": episode, "score": played.score})
            for record in played.decisions:
                record["seed"] = seed
            result.decisions.extend(played.decisions)
            for record in played.trace:
                record["seed"] = seed
            result.traces.extend(played.trace)
        result.seed_means[seed] = float(np.mean(scores))
        logger.info("%s split, seed %d: mean score %.3f", split, seed, result.seed_means[seed])

    logger.info("%s split: %.3f +/- %.3f over %d seeds", split, result.mean, result.std, len(seeds))
    return result
