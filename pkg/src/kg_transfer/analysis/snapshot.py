from __future__ import annotations

import pathlib
from dataclasses import dataclass
from typing import Any

from ..env.layout import WorldLayout, build_layout
from ..env.render import render_birdseye
from ..env.room_env import HiddenState
from ..errors import DecisionLogError, UsageError
from ..memory.export import memory_state_to_dot
from ..model.triple import MemoryItem, item_from_dict
from ..model.vocab import Vocabulary
from ..parser.loader import iter_jsonl
from ..schema.config_schema import WorldConfig


@dataclass
class EpisodeTrace:
    header: dict[str, Any]
    steps:  list[dict[str, Any]]

    @property
    def seed(self) -> int | None:
        return self.header.get("seed")

    @property
    def episode(self) -> int:
        return int(self.header.get("episode", 0))


def load_traces(path: str | pathlib.Path) -> list[EpisodeTrace]:
    """Split a trace file into episodes; each starts at a header line."""
    traces: list[EpisodeTrace] = []
    for lineno, record in iter_jsonl(path):
        kind = record.get("kind")
        if kind == "header":
            traces.append(EpisodeTrace(header=record, steps=[]))
        elif kind == "step":
            if not traces:
                raise DecisionLogError(f"{path}:{lineno}: step record before any header")
            traces[-1].steps.append(record)
        else:
            raise DecisionLogError(f"{path}:{lineno}: unknown trace record kind {kind!r}")
    if not traces:
        raise DecisionLogError(f"{path}: trace holds no episodes")
    return traces


def select_trace(traces: list[EpisodeTrace], episode: int = 0, seed: int | None = None) -> EpisodeTrace:
    for trace in traces:
        if trace.episode == episode and (seed is None or trace.seed == seed):
            return trace
    raise UsageError(f"Trace has no episode {episode}" + ("" if seed is None else f" for seed {seed}"))


@dataclass
class Snapshot:
    step:  int
    dot:   str
    ascii: str
    long:  tuple[MemoryItem, ...] = ()
    vocab: Vocabulary | None = None


def snapshot_step(trace: EpisodeTrace, step: int) -> Snapshot:
    """DOT graph of the memory state and ASCII render of the world at one traced step."""
    if not 0 <= step < len(trace.steps):
        raise UsageError(
            f"Step {step} is out of range; the trace covers steps 0..{len(trace.steps) - 1}"
        )
    world = WorldConfig(**trace.header["world"])
    layout: WorldLayout = build_layout(world)
    vocab = Vocabulary.for_world(layout.room_names, layout.object_names)
    record = trace.steps[step]
    short = [item_from_dict(d, vocab) for d in record["short"]]
    long = [item_from_dict(d, vocab) for d in record["long"]]
    state = HiddenState.from_dict(record["state"], layout)
    title = f"memory at step {record['step']} ({len(short)} short-term, {len(long)} long-term)"
    return Snapshot(
        step=step,
        dot=memory_state_to_dot(short, long, vocab, layout.category, title),
        ascii=render_birdseye(state, layout),
        long=tuple(long),
        vocab=vocab,
    )
