import csv
import json

import pytest

from kg_transfer.analysis import (
    RunScores, categorize, compare_runs, format_comparison, format_inspection,
    format_summary, inspect_step, load_decision_log, load_run, load_traces,
    mean_std, moving_average, select_trace, snapshot_step, summarize_decisions,
    write_comparison_csv, write_series_csv,
)
from kg_transfer.errors import DecisionLogError, UsageError
from kg_transfer.parser.loader import write_jsonl
from kg_transfer.policies.transfer import get_transfer_policy
from kg_transfer.rl import run_episode
from kg_transfer.schema.config_schema import PoliciesConfig


def _record(h, r, t, action, step=0, episode=0, query="john"):
    return {
        "episode": episode, "step": step, "triple": {"h": h, "r": r, "t": t},
        "action": action, "q_drop": None, "q_keep": None, "epsilon": None, "query": query,
    }


def _published_log():
    """560 decisions: agent 98/2, queried objects 58/2, directions 68/332."""
    groups = [
        (("agent", "at_location", "kitchen"), 98, 2),
        (("john", "at_location", "office"), 58, 2),
        (("kitchen", "north", "wall"), 68, 332),
    ]
    records = []
    for triple, keeps, drops in groups:
        for action in [1] * keeps + [0] * drops:
            records.append(_record(*triple, action, step=len(records) % 100))
    return records


# ------------------------------------------------------------------ #
# Decision-log summaries
# ------------------------------------------------------------------ #

class TestSummary:
    def test_published_counts(self):
        summary = summarize_decisions(_published_log())
        assert (summary.total, summary.keeps, summary.drops) == (560, 224, 336)
        assert summary.keep_rate == pytest.approx(0.40)
        cat = summary.per_category
        assert (cat["agent_location"].keep, cat["agent_location"].drop) == (98, 2)
        assert (cat["query_object_location"].keep, cat["query_object_location"].drop) == (58, 2)
        assert (cat["direction"].keep, cat["direction"].drop) == (68, 332)

    def test_table_text(self):
        text = format_summary(summarize_decisions(_published_log()))
        assert "keep_rate 0.40" in text
        assert "category:direction" in text
        line = next(l for l in text.splitlines() if l.startswith("category:agent_location"))
        assert line.split()[1:3] == ["98", "2"]

    def test_all_keep(self):
        records = [_record("agent", "at_location", "kitchen", 1, step=s) for s in range(5)]
        summary = summarize_decisions(records)
        assert summary.keep_rate == 1.0
        assert [rate for _, rate, _ in summary.series] == [1.0] * 5

    def test_empty_log(self):
        summary = summarize_decisions([])
        assert summary.total == 0
        assert summary.keep_rate == 0.0
        assert summary.series == []

    def test_unqueried_object_is_plain_object_location(self):
        assert categorize({"h": "table", "r": "at_location", "t": "office"}, {"john"}) == ["object_location"]
        assert categorize({"h": "john", "r": "at_location", "t": "office"}, {"john"}) == [
            "object_location", "query_object_location",
        ]
        assert categorize({"h": "office", "r": "west", "t": "kitchen"}, set()) == ["direction"]

    def test_per_relation(self):
        summary = summarize_decisions(_published_log())
        assert summary.per_relation["north"].keep_rate == pytest.approx(0.17)
        assert summary.per_relation["at_location"].total == 160


class TestSeries:
    def test_window_one_is_raw(self):
        records = [_record("agent", "at_location", "kitchen", s % 2, step=s) for s in range(6)]
        series = summarize_decisions(records, window=1).series
        assert [avg for _, _, avg in series] == [rate for _, rate, _ in series]

    def test_trailing_average(self):
        assert moving_average([0.0, 1.0, 1.0, 0.0], 2) == [0.0, 0.5, 1.0, 0.5]

    def test_bad_window(self):
        with pytest.raises(ValueError, match="positive"):
            moving_average([1.0], 0)

    def test_series_csv(self, tmp_path):
        records = [_record("agent", "at_location", "kitchen", 1, step=s) for s in range(3)]
        write_series_csv(summarize_decisions(records), tmp_path / "series.csv")
        with (tmp_path / "series.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert [r["step"] for r in rows] == ["0", "1", "2"]
        assert rows[0]["moving_avg"] == "1.000000"


class TestLoadDecisionLog:
    def test_round_trip(self, tmp_path):
        write_jsonl(tmp_path / "d.jsonl", _published_log()[:10])
        assert len(load_decision_log(tmp_path / "d.jsonl")) == 10

    def test_malformed_line_is_located(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text(json.dumps(_record("agent", "at_location", "kitchen", 1)) + "\n{oops\n")
        with pytest.raises(DecisionLogError, match=r"d\.jsonl:2: malformed JSON"):
            load_decision_log(path)

    def test_missing_field(self, tmp_path):
        record = _record("agent", "at_location", "kitchen", 1)
        del record["action"]
        write_jsonl(tmp_path / "d.jsonl", [record])
        with pytest.raises(DecisionLogError, match=":1: decision record is missing 'action'"):
            load_decision_log(tmp_path / "d.jsonl")

    def test_bad_action(self, tmp_path):
        write_jsonl(tmp_path / "d.jsonl", [_record("agent", "at_location", "kitchen", 2)])
        with pytest.raises(DecisionLogError, match="must be 0 or 1"):
            load_decision_log(tmp_path / "d.jsonl")


class TestInspectStep:
    def test_kept_and_dropped(self):
        records = [
            _record("agent", "at_location", "kitchen", 1, step=3),
            _record("kitchen", "north", "wall", 0, step=3),
            _record("john", "at_location", "kitchen", 1, step=3),
            _record("john", "at_location", "office", 0, step=4),
        ]
        found = inspect_step(records, episode=0, step=3)
        assert [t["h"] for t in found.kept] == ["agent", "john"]
        assert [t["r"] for t in found.dropped] == ["north"]
        text = format_inspection(found)
        assert "query: (john, at_location, ?)" in text
        assert "  (kitchen, north, wall)" in text

    def test_seed_filter(self):
        records = [dict(_record("agent", "at_location", "kitchen", 1), seed=0)]
        with pytest.raises(DecisionLogError, match="episode 0, step 0"):
            inspect_step(records, episode=0, step=0, seed=5)


# ------------------------------------------------------------------ #
# Cross-run statistics
# ------------------------------------------------------------------ #

def _write_run(directory, variant, scores, layout=None, split="test"):
    directory.mkdir(parents=True)
    manifest = {"variant": variant, "world_layout": layout or {"grid_length": 5, "world_seed": 0}}
    (directory / "manifest.json").write_text(json.dumps(manifest))
    with (directory / "eval_episodes.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["split", "seed", "episode", "score"])
        for seed, per_episode in scores.items():
            for episode, score in enumerate(per_episode):
                writer.writerow([split, seed, episode, score])
    return directory


class TestStats:
    def test_mean_std(self):
        assert mean_std([38, 40, 36, 42, 39]) == (39.0, 2.0)
        assert mean_std([41.0]) == (41.0, 0.0)

    def test_mean_std_empty(self):
        with pytest.raises(UsageError, match="empty"):
            mean_std([])

    def test_seed_means_from_episodes(self, tmp_path):
        run = load_run(_write_run(tmp_path / "a", "always", {0: [30, 32], 5: [40, 42]}))
        assert run.seed_means("test") == {0: 31.0, 5: 41.0}
        assert run.splits == ["test"]

    def test_compare(self, tmp_path):
        a = load_run(_write_run(tmp_path / "a", "always", {0: [30], 5: [34]}))
        b = load_run(_write_run(tmp_path / "b", "gcn+local_stm", {0: [38], 5: [40], 10: [42]}))
        rows = compare_runs([a, b])
        assert [(r.variant, r.mean, r.seeds) for r in rows] == [("always", 32.0, 2), ("gcn+local_stm", 40.0, 3)]
        assert rows[0].std == pytest.approx(2.0)
        text = format_comparison(rows)
        assert "32.000 ± 2.000" in text
        assert text.rstrip().endswith("(mean ± population std over seeds)")
        write_comparison_csv(rows, tmp_path / "cmp.csv")
        assert (tmp_path / "cmp.csv").read_text().splitlines()[0] == "variant,split,mean,std,seeds"

    def test_refuses_different_worlds(self, tmp_path):
        a = load_run(_write_run(tmp_path / "a", "always", {0: [30]}))
        b = load_run(_write_run(tmp_path / "b", "novel", {0: [30]}, layout={"grid_length": 7, "world_seed": 0}))
        with pytest.raises(UsageError, match="differing keys: grid_length"):
            compare_runs([a, b])

    def test_needs_two_runs(self, tmp_path):
        a = load_run(_write_run(tmp_path / "a", "always", {0: [30]}))
        with pytest.raises(UsageError, match="at least two"):
            compare_runs([a])

    def test_unevaluated_run(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(UsageError, match="no manifest.json"):
            load_run(tmp_path / "empty")

    def test_missing_path(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_run(tmp_path / "nowhere.yaml")

    def test_run_scores_split_filter(self, tmp_path):
        run = RunScores(tmp_path, "always", {}, [
            {"split": "train", "seed": "0", "score": "10"},
            {"split": "test", "seed": "0", "score": "20"},
        ])
        assert run.seed_means("train") == {0: 10.0}
        assert run.splits == ["test", "train"]


# ------------------------------------------------------------------ #
# Trace snapshots
# ------------------------------------------------------------------ #

@pytest.fixture
def trace_file(tmp_path, small_env):
    played = run_episode(
        small_env, get_transfer_policy("always"), PoliciesConfig(capacity=8),
        episode_seed=4, episode=0, record_trace=True,
    )
    for record in played.trace:
        record["seed"] = 0
    write_jsonl(tmp_path / "trace.jsonl", played.trace)
    return tmp_path / "trace.jsonl"


class TestSnapshot:
    def test_load_and_select(self, trace_file, small_world):
        (trace,) = load_traces(trace_file)
        assert len(trace.steps) == small_world.horizon
        assert select_trace([trace], episode=0, seed=0) is trace
        with pytest.raises(UsageError, match="no episode 3"):
            select_trace([trace], episode=3)

    def test_snapshot(self, trace_file):
        trace = select_trace(load_traces(trace_file))
        snap = snapshot_step(trace, 2)
        assert snap.dot.startswith("digraph memory {")
        assert "@" in snap.ascii
        assert "step 2" in snap.ascii

    def test_step_out_of_range(self, trace_file, small_world):
        trace = select_trace(load_traces(trace_file))
        with pytest.raises(UsageError, match="out of range"):
            snapshot_step(trace, small_world.horizon)

    def test_step_before_header(self, tmp_path):
        write_jsonl(tmp_path / "t.jsonl", [{"kind": "step", "step": 0}])
        with pytest.raises(DecisionLogError, match=":1: step record before any header"):
            load_traces(tmp_path / "t.jsonl")
