"""Command-line round trips: config file -> run directory -> tables."""
import csv
import json

import pytest
import yaml

from kg_transfer.cli import main

WORLD = {
    "grid_length": 3,
    "num_static_objects": 2,
    "num_moving_objects": 2,
    "num_inner_walls": 3,
    "horizon": 10,
    "world_seed": 3,
}


def _write_config(tmp_path, name, policies, **sections):
    config = {
        "name": name,
        "world": dict(WORLD),
        "policies": {"capacity": 8, **policies},
        "evaluation": {"episodes": 2, "splits": ["test"]},
        "output": {"directory": str(tmp_path / "runs" / name)},
        **sections,
    }
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(config))
    return path


@pytest.fixture
def learned_config(tmp_path):
    return _write_config(
        tmp_path, "learned", {"transfer": "learned"},
        trainer={"total_iterations": 30, "warm_start": 8, "replay_capacity": 64, "batch_size": 4,
                 "epsilon_decay_iters": 20, "target_update_interval": 5, "lr": 0.01, "seeds": [0, 1]},
        encoder={"kind": "rgcn", "dim": 4, "layers": 1, "num_bases": 2, "hidden": 4},
    )


@pytest.fixture
def always_config(tmp_path):
    return _write_config(tmp_path, "always", {"transfer": "always"}, trainer={"seeds": [0, 1]})


def test_train_writes_run_directory(tmp_path, learned_config, capsys):
    assert main(["train", str(learned_config)]) == 0
    run = tmp_path / "runs" / "learned"
    assert capsys.readouterr().out.strip() == str(run)
    assert (run / "checkpoint_seed0.pt").exists()
    assert (run / "checkpoint_seed1.pt").exists()

    with (run / "metrics.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["seed", "iteration", "episode", "loss", "epsilon", "episode_score"]
    assert {r["seed"] for r in rows} == {"0", "1"}
    # loss is blank until replay reaches warm_start
    assert rows[0]["loss"] == "" or float(rows[0]["loss"]) >= 0.0

    manifest = json.loads((run / "manifest.json").read_text())
    assert manifest["variant"] == "rgcn+local_stm"
    assert manifest["parameter_count"] > 0
    assert manifest["world_layout"]["grid_length"] == 3
    decisions = (run / "decisions_train.jsonl").read_text().splitlines()
    assert {json.loads(line)["seed"] for line in decisions} == {0, 1}


def test_train_then_eval(tmp_path, learned_config, capsys):
    assert main(["train", str(learned_config)]) == 0
    assert main(["eval", str(learned_config), "--trace"]) == 0
    out = capsys.readouterr().out
    assert "rgcn+local_stm test:" in out
    run = tmp_path / "runs" / "learned"

    results = json.loads((run / "eval_results.json").read_text())
    assert results["splits"]["test"]["seeds"] == [0, 1]
    with (run / "eval_episodes.csv").open() as fh:
        assert len(list(csv.DictReader(fh))) == 4
    first = json.loads((run / "decisions_test.jsonl").read_text().splitlines()[0])
    assert first["epsilon"] == 0.0
    assert "eval_wall_clock_seconds" in json.loads((run / "manifest.json").read_text())

    trace = run / "trace_test.jsonl"
    assert main(["snapshot", "--trace", str(trace), "--step", "3", "--seed", "1",
                 "--dot", str(tmp_path / "m.dot")]) == 0
    assert (tmp_path / "m.dot").read_text().startswith("digraph memory {")
    assert "step 3" in capsys.readouterr().out


def test_eval_without_checkpoint(learned_config, capsys):
    assert main(["eval", str(learned_config)]) == 1
    assert "checkpoint not found" in capsys.readouterr().err


def test_train_baseline_is_refused(always_config, capsys):
    assert main(["train", str(always_config)]) == 2
    assert "symbolic baseline" in capsys.readouterr().err


def test_compare_baselines(tmp_path, always_config, capsys):
    novel_config = _write_config(tmp_path, "novel", {"transfer": "novel"}, trainer={"seeds": [0, 1]})
    assert main(["eval", str(always_config)]) == 0
    assert main(["eval", str(novel_config)]) == 0
    capsys.readouterr()

    assert main(["compare", str(always_config), str(tmp_path / "runs" / "novel"),
                 "--csv", str(tmp_path / "cmp.csv")]) == 0
    out = capsys.readouterr().out
    assert "always" in out and "novel" in out
    assert "(mean ± population std over seeds)" in out
    with (tmp_path / "cmp.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["variant"] for r in rows] == ["always", "novel"]
    assert all(r["seeds"] == "2" for r in rows)


def test_compare_refuses_other_world(tmp_path, always_config, capsys):
    other = _write_config(tmp_path, "other", {"transfer": "novel"}, trainer={"seeds": [0]})
    raw = yaml.safe_load(other.read_text())
    raw["world"]["world_seed"] = 4
    other.write_text(yaml.safe_dump(raw))
    assert main(["eval", str(always_config)]) == 0
    assert main(["eval", str(other)]) == 0
    assert main(["compare", str(always_config), str(other)]) == 2
    assert "world_seed" in capsys.readouterr().err


def test_compare_missing_run(tmp_path, capsys):
    assert main(["compare", str(tmp_path / "a"), str(tmp_path / "b")]) == 1


def test_analyze_and_inspect(tmp_path, always_config, capsys):
    assert main(["eval", str(always_config)]) == 0
    log = tmp_path / "runs" / "always" / "decisions_test.jsonl"
    capsys.readouterr()

    assert main(["analyze-decisions", str(log), "--json", "--csv", str(tmp_path / "series.csv")]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["keep_rate"] == 1.0
    assert summary["drops"] == 0
    assert (tmp_path / "series.csv").read_text().startswith("step,keep_rate,moving_avg")

    assert main(["inspect-step", str(log), "--episode", "1", "--step", "0", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("episode 1 step 0")
    assert "dropped:\n" in out


def test_analyze_malformed_log(tmp_path, capsys):
    log = tmp_path / "bad.jsonl"
    log.write_text('{"episode": 0, "step": 0, "triple": {"h": "a", "r": "b", "t": "c"}, "action": 1}\nnot json\n')
    assert main(["analyze-decisions", str(log)]) == 2
    assert "bad.jsonl:2" in capsys.readouterr().err


def test_snapshot_from_config(tmp_path, always_config, capsys):
    assert main(["snapshot", "--config", str(always_config), "--step", "0"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("digraph memory {")
    assert "@" in out


def test_snapshot_step_out_of_range(always_config, capsys):
    assert main(["snapshot", "--config", str(always_config), "--step", "10"]) == 2
    assert "out of range" in capsys.readouterr().err


def test_missing_grid_length_is_named(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump({"world": {"horizon": 10}, "policies": {"transfer": "always"}}))
    assert main(["eval", str(path)]) == 2
    assert "world.grid_length" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["train", str(tmp_path / "nope.yaml")]) == 1
    assert "config file not found" in capsys.readouterr().err


def test_selfcheck_passes(capsys):
    assert main(["selfcheck"]) == 0
    out = capsys.readouterr().out
    assert "gradient_check" in out
    assert "FAIL" not in out


def test_train_is_reproducible(tmp_path, learned_config):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["train", str(learned_config), "-o", str(first)]) == 0
    assert main(["train", str(learned_config), "-o", str(second)]) == 0
    for name in ("metrics.csv", "decisions_train.jsonl"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_snapshot_writes_long_term_jsonl(tmp_path, always_config, capsys):
    out_file = tmp_path / "long.jsonl"
    assert main(["snapshot", "--config", str(always_config), "--step", "3", "--jsonl", str(out_file)]) == 0
    lines = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert lines
    assert all(set(line) == {"h", "r", "t", "ann"} for line in lines)
    assert f"{len(lines)} long-term)" in capsys.readouterr().out


def test_snapshot_unknown_seed(always_config, capsys):
    assert main(["snapshot", "--config", str(always_config), "--step", "0", "--seed", "7"]) == 2
    assert "valid seeds: [0, 1]" in capsys.readouterr().err
