from __future__ import annotations

import argparse
import csv
import json
import logging
import pathlib
import sys
import textwrap
import time
from typing import Any, TextIO

from .analysis import (
    compare_runs, format_comparison, format_inspection, format_summary, inspect_step,
    load_decision_log, load_run, load_traces, select_trace, snapshot_step,
    summarize_decisions, write_comparison_csv, write_series_csv,
)
from .analysis.snapshot import EpisodeTrace
from .analysis.stats import EPISODES_NAME, MANIFEST_NAME
from .env.room_env import RoomEnv
from .errors import KgTransferError, UsageError
from .memory.export import store_to_jsonl
from .neural.checkpoint import load_checkpoint, save_checkpoint
from .neural.qnet import parameter_count
from .parser.loader import load_config, write_jsonl
from .rl.episode import eval_episode_seed, run_episode
from .rl.evaluate import EPISODE_COLUMNS, evaluate, make_policy
from .rl.trainer import METRIC_COLUMNS, DQNTrainer
from .schema.config_schema import ExperimentConfig
from .selfcheck import run_selfcheck

logger = logging.getLogger("kg_transfer")


def _build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kg_transfer",
        description="Learned short-term to long-term memory transfer over knowledge-graph memories.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=textwrap.dedent("""\
            Examples:
              kg_transfer train configs/reduced_gcn_local_stm.yaml
              kg_transfer eval  configs/reduced_gcn_local_stm.yaml --trace
              kg_transfer compare runs/reduced_novel runs/reduced_gcn_local_stm --csv table.csv
              kg_transfer analyze-decisions runs/reduced_gcn_local_stm/decisions_test.jsonl
              kg_transfer inspect-step runs/reduced_gcn_local_stm/decisions_test.jsonl --episode 0 --step 12
              kg_transfer snapshot --trace runs/reduced_gcn_local_stm/trace_test.jsonl --step 30 --dot m30.dot
              kg_transfer selfcheck -v
        """),
    )
    p.add_argument("-v", "--verbose", action="store_true", help="Print diagnostic information to stderr")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    train = sub.add_parser("train", help="Train a learned transfer policy for every configured seed")
    train.add_argument("config", help="Experiment config (YAML or JSON)")
    train.add_argument("-o", "--output", default=None, metavar="DIR",
                       help="Run directory (default: output.directory from the config)")

    ev = sub.add_parser("eval", help="Evaluate a trained policy or a symbolic baseline")
    ev.add_argument("config", help="Experiment config (YAML or JSON)")
    ev.add_argument("-o", "--output", default=None, metavar="DIR",
                    help="Run directory holding checkpoints; results are written here too")
    ev.add_argument("--split", action="append", choices=["train", "test"], default=None,
                    help="Query split to evaluate (repeatable; default: evaluation.splits)")
    ev.add_argument("--episodes", type=int, default=None, help="Episodes per seed")
    ev.add_argument("--trace", action="store_true", help="Write per-step episode traces")

    cmp_ = sub.add_parser("compare", help="Tabulate mean ± std scores of evaluated runs")
    cmp_.add_argument("runs", nargs="+", help="Run directories or config files")
    cmp_.add_argument("--csv", default=None, metavar="FILE", help="Also write the table as CSV")

    an = sub.add_parser("analyze-decisions", help="Summarise a transfer decision log")
    an.add_argument("log", help="Decision log (JSONL)")
    an.add_argument("--window", type=int, default=10, help="Moving-average window in steps (default: 10)")
    an.add_argument("--csv", default=None, metavar="FILE",
                    help="Write the (step, keep_rate, moving_avg) series as CSV")
    an.add_argument("--json", action="store_true", help="Print the summary as JSON")

    ins = sub.add_parser("inspect-step", help="Show kept and dropped triples of one step")
    ins.add_argument("log", help="Decision log (JSONL)")
    ins.add_argument("--episode", type=int, default=0)
    ins.add_argument("--step", type=int, required=True)
    ins.add_argument("--seed", type=int, default=None)

    snap = sub.add_parser("snapshot", help="DOT memory graph and ASCII world view at one step")
    source = snap.add_mutually_exclusive_group(required=True)
    source.add_argument("--trace", default=None, metavar="FILE", help="Episode trace (JSONL)")
    source.add_argument("--config", default=None, metavar="FILE",
                        help="Play one greedy test episode of this experiment and snapshot it")
    snap.add_argument("--step", type=int, required=True)
    snap.add_argument("--episode", type=int, default=0)
    snap.add_argument("--seed", type=int, default=None)
    snap.add_argument("--dot", default=None, metavar="FILE", help="Write DOT here instead of stdout")
    snap.add_argument("--jsonl", default=None, metavar="FILE",
                      help="Also write the long-term store at this step as JSONL")

    chk = sub.add_parser("selfcheck", help="Run the randomized oracle checks")
    chk.add_argument("--seed", type=int, default=0)
    return p


# ---------------------------------------------------------------------- #
# Helpers
# ---------------------------------------------------------------------- #

class CommandError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _load(path: str) -> ExperimentConfig:
    config_path = pathlib.Path(path)
    if not config_path.exists():
        raise CommandError(f"config file not found: {config_path}", 1)
    logger.info("loading: %s", config_path)
    return load_config(config_path)


def _run_dir(config: ExperimentConfig, override: str | None) -> pathlib.Path:
    directory = pathlib.Path(override or config.output.directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CommandError(f"could not create run directory: {exc}", 4) from exc
    return directory


def _checkpoint_path(directory: pathlib.Path, seed: int) -> pathlib.Path:
    return directory / f"checkpoint_seed{seed}.pt"


def _write_manifest(directory: pathlib.Path, config: ExperimentConfig, **extra: Any) -> None:
    path = directory / MANIFEST_NAME
    manifest: dict[str, Any] = {}
    if path.exists():
        manifest = json.loads(path.read_text(encoding="utf-8"))
    manifest.update({
        "name": config.name,
        "variant": config.variant,
        "config": config.model_dump(mode="json"),
        "seeds": config.seeds,
        "world_layout": config.world.layout_key(),
    })
    manifest.update(extra)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _format_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def _jsonl_sink(fh: TextIO, seed: int):
    def sink(records: list[dict[str, Any]]) -> None:
        for record in records:
            record["seed"] = seed
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return sink


# ---------------------------------------------------------------------- #
# Commands
# ---------------------------------------------------------------------- #

def cmd_train(args: argparse.Namespace) -> int:
    config = _load(args.config)
    if config.policies.transfer != "learned":
        raise CommandError(
            f"policies.transfer='{config.policies.transfer}' is a symbolic baseline; nothing to train", 2,
        )
    directory = _run_dir(config, args.output)
    started = time.perf_counter()
    rows: list[list[Any]] = []
    params = 0
    log_file = (directory / "decisions_train.jsonl").open("w", encoding="utf-8") if config.output.decision_log else None
    try:
        for seed in config.seeds:
            trainer = DQNTrainer(config, seed)
            params = parameter_count(trainer.online)
            result = trainer.run(_jsonl_sink(log_file, seed) if log_file else None)
            save_checkpoint(
                _checkpoint_path(directory, seed), result.network, result.vocab,
                meta={"seed": seed, "iterations": result.iterations, "updates": result.updates,
                      "variant": config.variant},
            )
            rows.extend([seed, *(_format_cell(m[c]) for c in METRIC_COLUMNS)] for m in result.metrics)
            logger.info("seed %d: %d iterations, %d updates", seed, result.iterations, result.updates)
    finally:
        if log_file:
            log_file.close()

    with (directory / "metrics.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", *METRIC_COLUMNS])
        writer.writerows(rows)
    _write_manifest(
        directory, config,
        parameter_count=params,
        wall_clock_seconds=round(time.perf_counter() - started, 3),
    )
    print(directory)
    return 0


def _load_networks(config: ExperimentConfig, directory: pathlib.Path) -> dict[int, Any] | None:
    if config.policies.transfer != "learned":
        return None
    vocab = RoomEnv(config.world).vocab
    networks = {}
    for seed in config.seeds:
        path = _checkpoint_path(directory, seed)
        if not path.exists():
            raise CommandError(f"checkpoint not found: {path} (run 'kg_transfer train' first)", 1)
        networks[seed], _ = load_checkpoint(path, vocab=vocab)
    return networks


def cmd_eval(args: argparse.Namespace) -> int:
    config = _load(args.config)
    directory = _run_dir(config, args.output)
    networks = _load_networks(config, directory)
    splits = args.split or config.evaluation.splits
    write_trace = args.trace or config.evaluation.write_trace

    started = time.perf_counter()
    summary: dict[str, Any] = {"variant": config.variant, "splits": {}}
    rows: list[dict[str, Any]] = []
    for split in splits:
        result = evaluate(
            config, split,
            networks=networks,
            episodes=args.episodes,
            record_decisions=config.output.decision_log,
            record_trace=write_trace,
        )
        summary["splits"][split] = result.to_dict()
        rows.extend(result.episodes)
        if config.output.decision_log:
            write_jsonl(directory / f"decisions_{split}.jsonl", result.decisions)
        if write_trace:
            write_jsonl(directory / f"trace_{split}.jsonl", result.traces)
        print(f"{config.variant} {split}: {result.mean:.3f} ± {result.std:.3f}")

    (directory / "eval_results.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    with (directory / EPISODES_NAME).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=EPISODE_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    _write_manifest(directory, config, eval_wall_clock_seconds=round(time.perf_counter() - started, 3))
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    runs = []
    for path in args.runs:
        try:
            runs.append(load_run(path))
        except FileNotFoundError as exc:
            raise CommandError(f"run not found: {exc}", 1) from exc
    rows = compare_runs(runs)
    sys.stdout.write(format_comparison(rows))
    if args.csv:
        write_comparison_csv(rows, args.csv)
    return 0


def _require(path: str) -> pathlib.Path:
    p = pathlib.Path(path)
    if not p.exists():
        raise CommandError(f"input file not found: {p}", 1)
    return p


def cmd_analyze(args: argparse.Namespace) -> int:
    records = load_decision_log(_require(args.log))
    summary = summarize_decisions(records, window=args.window)
    if args.json:
        sys.stdout.write(json.dumps(summary.to_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(format_summary(summary))
    if args.csv:
        write_series_csv(summary, args.csv)
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    records = load_decision_log(_require(args.log))
    sys.stdout.write(format_inspection(inspect_step(records, args.episode, args.step, args.seed)))
    return 0


def cmd_snapshot(args: argparse.Namespace) -> int:
    if args.trace:
        traces = load_traces(_require(args.trace))
    else:
        config = _load(args.config)
        directory = pathlib.Path(config.output.directory)
        networks = _load_networks(config, directory)
        seed = args.seed if args.seed is not None else config.seeds[0]
        if seed not in config.seeds:
            raise UsageError(f"Seed {seed} is not configured; valid seeds: {list(config.seeds)}")
        env = RoomEnv(config.world.model_copy(update={"query_split": "test"}))
        played = run_episode(
            env, make_policy(config, networks[seed] if networks else None), config.policies,
            eval_episode_seed(seed, args.episode), args.episode,
            record_decisions=False, record_trace=True,
        )
        for record in played.trace:
            record["seed"] = seed
        traces = [EpisodeTrace(header=played.trace[0], steps=played.trace[1:])]
    trace = select_trace(traces, args.episode, args.seed)
    snap = snapshot_step(trace, args.step)
    if args.jsonl:
        store_to_jsonl(snap.long, snap.vocab, args.jsonl)
    if args.dot:
        pathlib.Path(args.dot).write_text(snap.dot, encoding="utf-8")
        sys.stdout.write(snap.ascii)
    else:
        sys.stdout.write(snap.dot + "\n" + snap.ascii)
    return 0


def cmd_selfcheck(args: argparse.Namespace) -> int:
    results = run_selfcheck(seed=args.seed)
    for r in results:
        status = "ok" if r.passed else "FAIL"
        print(f"{r.name:<24}{status}" + (f"  {r.detail}" if r.detail else ""))
    return 0 if all(r.passed for r in results) else 3


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "analyze-decisions": cmd_analyze,
    "inspect-step": cmd_inspect,
    "snapshot": cmd_snapshot,
    "selfcheck": cmd_selfcheck,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_arg_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="[kg_transfer] %(message)s", stream=sys.stderr, force=True)
    else:
        logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except KgTransferError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: could not write output: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:
        print(f"error: {args.command} failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
