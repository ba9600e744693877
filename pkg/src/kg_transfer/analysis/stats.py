from __future__ import annotations

import csv
import json
import pathlib
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from ..errors import ConfigError, UsageError
from ..parser.loader import load_config

MANIFEST_NAME = "manifest.json"
EPISODES_NAME = "eval_episodes.csv"
COMPARISON_COLUMNS = ("variant", "split", "mean", "std", "seeds")


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation."""
    if not len(values):
        raise UsageError("Cannot summarise an empty list of scores")
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


@dataclass
class RunScores:
    """Per-episode scores of one evaluated run directory."""

    directory:  pathlib.Path
    variant:    str
    layout_key: dict[str, Any]
    episodes:   list[dict[str, Any]] = field(default_factory=list)

    def seed_means(self, split: str) -> dict[int, float]:
        by_seed: dict[int, list[float]] = defaultdict(list)
        for row in self.episodes:
            if row["split"] == split:
                by_seed[int(row["seed"])].append(float(row["score"]))
        return {s: float(np.mean(v)) for s, v in sorted(by_seed.items())}

    @property
    def splits(self) -> list[str]:
        return sorted({row["split"] for row in self.episodes})


def resolve_run_dir(path: str | pathlib.Path) -> pathlib.Path:
    """A run directory as given, or the output directory named by a config file."""
    path = pathlib.Path(path)
    if path.is_dir():
        return path
    if not path.exists():
        raise FileNotFoundError(path)
    return pathlib.Path(load_config(path).output.directory)


def load_run(path: str | pathlib.Path) -> RunScores:
    directory = resolve_run_dir(path)
    manifest_path = directory / MANIFEST_NAME
    episodes_path = directory / EPISODES_NAME
    for needed in (manifest_path, episodes_path):
        if not needed.exists():
            raise UsageError(f"Run directory '{directory}' has no {needed.name}; train and evaluate it first")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{manifest_path}: malformed JSON ({exc.msg})") from exc
    with episodes_path.open(newline="", encoding="utf-8") as fh:
        episodes = list(csv.DictReader(fh))
    return RunScores(
        directory=directory,
        variant=manifest["variant"],
        layout_key=manifest["world_layout"],
        episodes=episodes,
    )


@dataclass(frozen=True)
class ComparisonRow:
    variant: str
    split:   str
    mean:    float
    std:     float
    seeds:   int


def compare_runs(runs: Iterable[RunScores]) -> list[ComparisonRow]:
    """Mean +/- population std over per-seed mean scores, per variant and split."""
    runs = list(runs)
    if len(runs) < 2:
        raise UsageError(f"Comparison needs at least two runs, got {len(runs)}")
    reference = runs[0]
    for run in runs[1:]:
        if run.layout_key != reference.layout_key:
            diff = sorted(
                k for k in set(run.layout_key) | set(reference.layout_key)
                if run.layout_key.get(k) != reference.layout_key.get(k)
            )
            raise UsageError(
                f"Runs '{reference.directory}' and '{run.directory}' use different worlds "
                f"(differing keys: {', '.join(diff)})"
            )
    rows = []
    for run in runs:
        for split in run.splits:
            means = run.seed_means(split)
            mean, std = mean_std(list(means.values()))
            rows.append(ComparisonRow(run.variant, split, mean, std, len(means)))
    return rows


def format_comparison(rows: Sequence[ComparisonRow]) -> str:
    splits = sorted({r.split for r in rows})
    variants = list(dict.fromkeys(r.variant for r in rows))
    cell = {(r.variant, r.split): f"{r.mean:.3f} ± {r.std:.3f}" for r in rows}
    width = max(len("variant"), *(len(v) for v in variants)) + 2
    col = max(16, *(len(c) for c in cell.values())) + 2
    lines = [f"{'variant':<{width}}" + "".join(f"{s:>{col}}" for s in splits)]
    for v in variants:
        lines.append(f"{v:<{width}}" + "".join(f"{cell.get((v, s), '-'):>{col}}" for s in splits))
    lines.append("(mean ± population std over seeds)")
    return "\n".join(lines) + "\n"


def write_comparison_csv(rows: Sequence[ComparisonRow], path: str | pathlib.Path) -> None:
    with pathlib.Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_COLUMNS)
        for r in rows:
            writer.writerow([r.variant, r.split, f"{r.mean:.6f}", f"{r.std:.6f}", r.seeds])
