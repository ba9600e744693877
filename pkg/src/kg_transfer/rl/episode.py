from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ..env.room_env import Query, RoomEnv
from ..model.triple import item_to_dict, triple_to_dict
from ..policies.agent import MemoryAgent
from ..policies.transfer import TransferPolicy
from ..schema.config_schema import PoliciesConfig
from .learned import LearnedTransfer
from .replay import Transition

logger = logging.getLogger(__name__)

_EXPLORE_STREAM = 11
_DECIDE_STREAM = 12

TRAIN_SEED_STRIDE = 100_000
EVAL_SEED_OFFSET = 1_000_000_000


def train_episode_seed(seed: int, episode: int) -> int:
    return seed * TRAIN_SEED_STRIDE + episode


def eval_episode_seed(seed: int, episode: int) -> int:
    return EVAL_SEED_OFFSET + seed * TRAIN_SEED_STRIDE + episode


@dataclass
class EpisodeResult:
    episode: int
    score:   float
    steps:   int
    decisions: list[dict[str, Any]] = field(default_factory=list)
    trace:     list[dict[str, Any]] = field(default_factory=list)


def _query_dict(query: Query | None, env: RoomEnv) -> dict[str, str] | None:
    if query is None:
        return None
    labels = env.vocab.entities
    return {
        "h": labels.label_of(query.head),
        "r": env.vocab.relations.label_of(query.relation),
        "truth": labels.label_of(query.truth),
    }


def run_episode(
    env: RoomEnv,
    policy: TransferPolicy,
    policies: PoliciesConfig,
    episode_seed: int,
    episode: int = 0,
    *,
    before_decide: Callable[[], None] | None = None,
    on_transition: Callable[[Transition], None] | None = None,
    record_decisions: bool = True,
    record_trace: bool = False,
    max_steps: int | None = None,
) -> EpisodeResult:
    """
    Play one episode with the fixed symbolic agent and the given transfer policy.

    Per step: snapshot M_t, decide and apply transfers, answer the pending
    query, pick a move, step the world, observe M_{t+1}, then hand the
    transition to on_transition. The reward of step t is the answer to the
    query posed at t, after that step's transfers. max_steps cuts the
    episode short.
    """
    env_state, observation, query = env.reset(episode_seed)
    agent = MemoryAgent(
        env.vocab,
        capacity=policies.capacity,
        qa=policies.qa,
        eviction=policies.eviction,
        explore_rng=np.random.default_rng(np.random.SeedSequence([episode_seed, _EXPLORE_STREAM])),
    )
    decide_rng = np.random.default_rng(np.random.SeedSequence([episode_seed, _DECIDE_STREAM]))
    agent.observe(observation, env_state.step)
    result = EpisodeResult(episode=episode, score=0.0, steps=0)
    if record_trace:
        result.trace.append({
            "kind": "header",
            "episode": episode,
            "episode_seed": episode_seed,
            "world": env.config.model_dump(),
        })

    done = False
    while not done and (max_steps is None or result.steps < max_steps):
        t = env_state.step
        m_t = agent.state()
        if before_decide is not None:
            before_decide()
        actions = policy.decide(agent.short, agent.long, decide_rng)
        if record_decisions:
            result.decisions.extend(_decision_records(policy, agent, actions, episode, t, query, env))

        agent.transfer(actions)
        answer = agent.answer(query)
        move = agent.explore()
        if record_trace:
            result.trace.append({
                "kind": "step",
                "step": t,
                "state": env_state.to_dict(env.layout),
                "short": [item_to_dict(m, env.vocab) for m in agent.short.items],
                "long": [item_to_dict(m, env.vocab) for m in agent.long.items()],
                "query": _query_dict(query, env),
                "answer": env.vocab.entities.label_of(answer.answer),
                "move": move,
            })

        step = env.step(move, answer.answer)
        if record_trace:
            result.trace[-1]["reward"] = step.reward
        agent.observe(step.observation, step.state.step)
        transition = Transition(
            state=m_t,
            actions=tuple(actions),
            reward=step.reward,
            next_state=agent.state(),
            done=step.done,
        )
        if on_transition is not None:
            on_transition(transition)

        result.score += step.reward
        result.steps += 1
        env_state, query, done = step.state, step.query, step.done

    logger.debug("episode %d (seed %d) score %.1f", episode, episode_seed, result.score)
    return result


def _decision_records(
    policy: TransferPolicy,
    agent: MemoryAgent,
    actions: list[int],
    episode: int,
    step: int,
    query: Query | None,
    env: RoomEnv,
) -> list[dict[str, Any]]:
    learned = isinstance(policy, LearnedTransfer)
    queried = None if query is None else env.vocab.entities.label_of(query.head)
    records = []
    for i, (item, action) in enumerate(zip(agent.short.items, actions)):
        q_drop = q_keep = epsilon = None
        if learned:
            q_drop, q_keep = (float(v) for v in policy.last_q[i])
            epsilon = policy.epsilon
        records.append({
            "episode": episode,
            "step": step,
            "triple": triple_to_dict(item.triple, env.vocab),
            "action": int(action),
            "q_drop": q_drop,
            "q_keep": q_keep,
            "epsilon": epsilon,
            "query": queried,
        })
    return records
