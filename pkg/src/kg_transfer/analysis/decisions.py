from __future__ import annotations

import csv
import pathlib
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable

from ..errors import DecisionLogError
from ..model.vocab import AGENT, AT_LOCATION, DIRECTIONS
from ..parser.loader import iter_jsonl

CATEGORIES = ("agent_location", "object_location", "query_object_location", "direction")
SERIES_COLUMNS = ("step", "keep_rate", "moving_avg")


@dataclass
class KeepDrop:
    keep: int = 0
    drop: int = 0

    @property
    def total(self) -> int:
        return self.keep + self.drop

    @property
    def keep_rate(self) -> float:
        return self.keep / self.total if self.total else 0.0

    def add(self, action: int) -> None:
        if action:
            self.keep += 1
        else:
            self.drop += 1


@dataclass
class DecisionLogSummary:
    total:        int
    keeps:        int
    drops:        int
    per_relation: dict[str, KeepDrop] = field(default_factory=dict)
    per_category: dict[str, KeepDrop] = field(default_factory=dict)
    series:       list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def keep_rate(self) -> float:
        return self.keeps / self.total if self.total else 0.0

    def to_dict(self) -> dict[str, Any]:
        def counts(table: dict[str, KeepDrop]) -> dict[str, dict[str, int]]:
            return {k: {"keep": v.keep, "drop": v.drop} for k, v in table.items()}

        return {
            "total": self.total,
            "keeps": self.keeps,
            "drops": self.drops,
            "keep_rate": self.keep_rate,
            "per_relation": counts(self.per_relation),
            "per_category": counts(self.per_category),
        }


def load_decision_log(path: str | pathlib.Path) -> list[dict[str, Any]]:
    """Read and validate a decision log; errors carry path:line."""
    records = []
    for lineno, record in iter_jsonl(path):
        _check_record(record, f"{path}:{lineno}")
        records.append(record)
    return records


def _check_record(record: dict[str, Any], where: str) -> None:
    for key in ("episode", "step", "triple", "action"):
        if key not in record:
            raise DecisionLogError(f"{where}: decision record is missing '{key}'")
    triple = record["triple"]
    if not isinstance(triple, dict) or not all(isinstance(triple.get(k), str) for k in ("h", "r", "t")):
        raise DecisionLogError(f"{where}: 'triple' must be an object with string h, r and t")
    if record["action"] not in (0, 1):
        raise DecisionLogError(f"{where}: 'action' must be 0 or 1, got {record['action']!r}")
    if not isinstance(record["step"], int) or record["step"] < 0:
        raise DecisionLogError(f"{where}: 'step' must be a non-negative integer")


def categorize(triple: dict[str, str], queried: set[str]) -> list[str]:
    """Categories a decision counts towards; query objects also count as object locations."""
    if triple["r"] in DIRECTIONS:
        return ["direction"]
    if triple["r"] != AT_LOCATION:
        return []
    if triple["h"] == AGENT:
        return ["agent_location"]
    if triple["h"] in queried:
        return ["object_location", "query_object_location"]
    return ["object_location"]


def moving_average(values: list[float], window: int) -> list[float]:
    """Trailing mean over the last `window` values (fewer at the start)."""
    if window < 1:
        raise ValueError(f"Moving-average window must be positive, got {window}")
    out = []
    running = 0.0
    for i, v in enumerate(values):
        running += v
        if i >= window:
            running -= values[i - window]
        out.append(running / min(i + 1, window))
    return out


def summarize_decisions(records: Iterable[dict[str, Any]], window: int = 10) -> DecisionLogSummary:
    records = list(records)
    queried = {r["query"] for r in records if r.get("query")}
    per_relation: dict[str, KeepDrop] = defaultdict(KeepDrop)
    per_category = {c: KeepDrop() for c in CATEGORIES}
    per_step: dict[int, KeepDrop] = defaultdict(KeepDrop)
    keeps = 0
    for r in records:
        action = int(r["action"])
        keeps += action
        per_relation[r["triple"]["r"]].add(action)
        for category in categorize(r["triple"], queried):
            per_category[category].add(action)
        per_step[int(r["step"])].add(action)

    steps = sorted(per_step)
    rates = [per_step[s].keep_rate for s in steps]
    smoothed = moving_average(rates, window)
    return DecisionLogSummary(
        total=len(records),
        keeps=keeps,
        drops=len(records) - keeps,
        per_relation=dict(sorted(per_relation.items())),
        per_category=per_category,
        series=list(zip(steps, rates, smoothed)),
    )


def format_summary(summary: DecisionLogSummary) -> str:
    lines = [
        f"decisions {summary.total}  keeps {summary.keeps}  drops {summary.drops}  "
        f"keep_rate {summary.keep_rate:.2f}",
        "",
        f"{'group':<24}{'keep':>8}{'drop':>8}{'keep_rate':>11}",
    ]
    for title, table in (("relation", summary.per_relation), ("category", summary.per_category)):
        for name, kd in table.items():
            lines.append(f"{title + ':' + name:<24}{kd.keep:>8}{kd.drop:>8}{kd.keep_rate:>11.2f}")
    return "\n".join(lines) + "\n"


def write_series_csv(summary: DecisionLogSummary, path: str | pathlib.Path) -> None:
    with pathlib.Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SERIES_COLUMNS)
        for step, rate, avg in summary.series:
            writer.writerow([step, f"{rate:.6f}", f"{avg:.6f}"])


# ------------------------------------------------------------------ #
# Step inspection
# ------------------------------------------------------------------ #

@dataclass
class StepInspection:
    episode: int
    step:    int
    kept:    list[dict[str, str]]
    dropped: list[dict[str, str]]
    query:   str | None = None


def inspect_step(
    records: Iterable[dict[str, Any]],
    episode: int,
    step: int,
    seed: int | None = None,
) -> StepInspection:
    """Kept and dropped triples of one step, in decision order."""
    chosen = [
        r for r in records
        if r["episode"] == episode and r["step"] == step and (seed is None or r.get("seed") == seed)
    ]
    if not chosen:
        raise DecisionLogError(f"No decisions logged for episode {episode}, step {step}")
    return StepInspection(
        episode=episode,
        step=step,
        kept=[r["triple"] for r in chosen if r["action"] == 1],
        dropped=[r["triple"] for r in chosen if r["action"] == 0],
        query=chosen[0].get("query"),
    )


def format_inspection(inspection: StepInspection) -> str:
    def fmt(t: dict[str, str]) -> str:
        return f"({t['h']}, {t['r']}, {t['t']})"

    lines = [f"episode {inspection.episode} step {inspection.step}"]
    if inspection.query:
        lines.append(f"query: ({inspection.query}, {AT_LOCATION}, ?)")
    lines.append("kept:")
    lines.extend(f"  {fmt(t)}" for t in inspection.kept)
    lines.append("dropped:")
    lines.extend(f"  {fmt(t)}" for t in inspection.dropped)
    return "\n".join(lines) + "\n"
