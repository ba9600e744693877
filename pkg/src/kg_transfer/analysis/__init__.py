from .decisions import (
    CATEGORIES, DecisionLogSummary, KeepDrop, StepInspection, categorize,
    format_inspection, format_summary, inspect_step, load_decision_log,
    moving_average, summarize_decisions, write_series_csv,
)
from .stats import (
    ComparisonRow, RunScores, compare_runs, format_comparison, load_run,
    mean_std, write_comparison_csv,
)
from .snapshot import EpisodeTrace, Snapshot, load_traces, select_trace, snapshot_step

__all__ = [
    "CATEGORIES",
    "DecisionLogSummary",
    "KeepDrop",
    "StepInspection",
    "categorize",
    "format_inspection",
    "format_summary",
    "inspect_step",
    "load_decision_log",
    "moving_average",
    "summarize_decisions",
    "write_series_csv",
    "ComparisonRow",
    "RunScores",
    "compare_runs",
    "format_comparison",
    "load_run",
    "mean_std",
    "write_comparison_csv",
    "EpisodeTrace",
    "Snapshot",
    "load_traces",
    "select_trace",
    "snapshot_step",
]
