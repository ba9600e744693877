from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import torch

from ..env.room_env import RoomEnv
from ..model.vocab import Vocabulary
from ..neural.qnet import TransferQNetwork, parameter_count
from ..schema.config_schema import ExperimentConfig
from .episode import run_episode, train_episode_seed
from .learned import LearnedTransfer
from .replay import ReplayBuffer, Transition
from .schedule import epsilon_at
from .td import td_loss, td_targets

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("iteration", "episode", "loss", "epsilon", "episode_score")

_RESHUFFLE_STREAM = 21


@dataclass
class TrainResult:
    network:    TransferQNetwork
    vocab:      Vocabulary
    seed:       int
    metrics:    list[dict[str, Any]] = field(default_factory=list)
    iterations: int = 0
    updates:    int = 0


def build_network(config: ExperimentConfig, vocab: Vocabulary, seed: int) -> TransferQNetwork:
    enc = config.encoder
    return TransferQNetwork(
        num_entities=len(vocab.entities),
        num_relations=len(vocab.relations),
        kind=enc.kind,
        dim=enc.dim,
        layers=enc.layers,
        num_bases=enc.num_bases,
        hidden=enc.hidden,
        seed=seed,
        dtype=config.trainer.dtype,
    )


class DQNTrainer:
    """
    Per-item DQN over memory graphs.

    One iteration per environment step. Transitions go to replay first;
    once warm_start steps have passed every iteration samples a
    batch, takes one clipped optimizer step on the matched TD loss, and
    every target_update_interval iterations the target net is hard-copied
    from the online net.
    """

    def __init__(self, config: ExperimentConfig, seed: int) -> None:
        self.config = config
        self.seed = seed
        cfg = config.trainer
        self.env = RoomEnv(config.world.model_copy(update={"query_split": "train"}))
        self.online = build_network(config, self.env.vocab, seed)
        self.target = copy.deepcopy(self.online)
        self.target.requires_grad_(False)

        if cfg.optimizer == "adam":
            self.optimizer: torch.optim.Optimizer = torch.optim.Adam(self.online.parameters(), lr=cfg.lr)
        else:
            self.optimizer = torch.optim.SGD(self.online.parameters(), lr=cfg.lr)

        self.replay = ReplayBuffer(
            capacity=cfg.replay_capacity,
            warm_start=cfg.warm_start,
            batch_size=cfg.batch_size,
            seed=seed,
        )
        self.reshuffle_rng = (
            np.random.default_rng(np.random.SeedSequence([seed, _RESHUFFLE_STREAM]))
            if cfg.reshuffle_matching else None
        )
        self.iteration = 0
        self.updates = 0
        self._episode_losses: list[float] = []
        self.policy = LearnedTransfer(
            self.online,
            head=cfg.head,
            graph_mode=cfg.graph_mode,
            horizon=config.world.horizon,
            epsilon=self.epsilon,
        )
        logger.info(
            "seed %d: %s encoder, mode %s, %d parameters",
            seed, config.encoder.kind, cfg.mode, parameter_count(self.online),
        )

    @property
    def epsilon(self) -> float:
        cfg = self.config.trainer
        return epsilon_at(self.iteration, cfg.epsilon_max, cfg.epsilon_min, cfg.epsilon_decay_iters)

    @property
    def finished(self) -> bool:
        return self.iteration >= self.config.trainer.total_iterations

    # ------------------------------------------------------------------ #
    # One iteration
    # ------------------------------------------------------------------ #

    def optimize(self, batch: list[Transition]) -> float | None:
        """One gradient step on a sampled batch; None when no transition has a matched pair."""
        cfg = self.config.trainer
        terms = td_targets(
            batch, self.online, self.target, cfg.gamma,
            head=cfg.head,
            graph_mode=cfg.graph_mode,
            horizon=self.config.world.horizon,
            double_dqn=cfg.double_dqn,
            reshuffle_rng=self.reshuffle_rng,
        )
        loss = td_loss(terms)
        if loss is None:
            logger.debug("iteration %d: batch has no matched pairs, update skipped", self.iteration)
            return None
        self.optimizer.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_value_(self.online.parameters(), cfg.grad_clip_value)
        self.optimizer.step()
        self.updates += 1
        logger.debug(
            "iteration %d: loss %.6f, matched %s",
            self.iteration, loss.item(), [t.matched for t in terms],
        )
        return float(loss.item())

    def sync_target(self) -> None:
        self.target.load_state_dict(self.online.state_dict())
        logger.debug("iteration %d: target network synced", self.iteration)

    def _on_transition(self, transition: Transition) -> None:
        # the first warm_start steps only fill replay
        warm = self.replay.ready
        self.replay.push(transition)
        if warm:
            loss = self.optimize(self.replay.sample())
            if loss is not None:
                self._episode_losses.append(loss)
        self.iteration += 1
        if self.iteration % self.config.trainer.target_update_interval == 0:
            self.sync_target()

    def _before_decide(self) -> None:
        self.policy.epsilon = self.epsilon

    # ------------------------------------------------------------------ #
    # Loop
    # ------------------------------------------------------------------ #

    def run(
        self,
        decision_sink: Callable[[list[dict[str, Any]]], None] | None = None,
    ) -> TrainResult:
        result = TrainResult(network=self.online, vocab=self.env.vocab, seed=self.seed)
        total = self.config.trainer.total_iterations
        episode = 0
        while not self.finished:
            self._episode_losses = []
            played = run_episode(
                self.env,
                self.policy,
                self.config.policies,
                train_episode_seed(self.seed, episode),
                episode,
                before_decide=self._before_decide,
                on_transition=self._on_transition,
                record_decisions=decision_sink is not None,
                max_steps=total - self.iteration,
            )
            if decision_sink is not None:
                decision_sink(played.decisions)
            mean_loss = float(np.mean(self._episode_losses)) if self._episode_losses else None
            result.metrics.append({
                "iteration": self.iteration,
                "episode": episode,
                "loss": mean_loss,
                "epsilon": self.epsilon,
                "episode_score": played.score,
            })
            logger.info(
                "seed %d episode %d: score %.0f, epsilon %.3f, loss %s",
                self.seed, episode, played.score, self.epsilon,
                "-" if mean_loss is None else f"{mean_loss:.5f}",
            )
            episode += 1

        result.iterations = self.iteration
        result.updates = self.updates
        return result


def train(
    config: ExperimentConfig,
    seed: int,
    decision_sink: Callable[[list[dict[str, Any]]], None] | None = None,
) -> TrainResult:
    """Train one seed; the returned network is the final online network."""
    return DQNTrainer(config, seed).run(decision_sink)
