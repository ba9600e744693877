from __future__ import annotations

import json
import pathlib
from typing import Any, Iterator

import yaml
from pydantic import ValidationError

from ..errors import ConfigError, DecisionLogError
from ..schema.config_schema import ExperimentConfig


def load_config(path: str | pathlib.Path) -> ExperimentConfig:
    """
    Load a JSON or YAML experiment file and validate it.

    Validation failures are reported as ConfigError with the dotted key of
    every offending field, e.g. "world.grid_length: Field required".
    """
    path = pathlib.Path(path)
    raw = _read_raw(path)
    if not isinstance(raw, dict):
        raise ConfigError(f"'{path}': top level must be a mapping of sections")
    return parse_config(raw, source=str(path))


def parse_config(raw: dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid config '{source}': {format_validation_error(exc)}") from exc


def format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        key = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{key}: {err['msg']}")
    return "; ".join(parts)


def _read_raw(path: pathlib.Path) -> Any:
    suffix = path.suffix.lower()
    text = path.read_text(encoding="utf-8")
    try:
        if suffix in (".yaml", ".yml"):
            return yaml.safe_load(text)
        if suffix == ".json":
            return json.loads(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(f"'{path}' is not well-formed: {exc}") from exc
    raise ConfigError(
        f"Unsupported file extension '{suffix}'. Expected .json, .yaml, or .yml."
    )


def iter_jsonl(path: str | pathlib.Path) -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield (line_number, record) for every non-blank line; 1-based line numbers."""
    path = pathlib.Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DecisionLogError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise DecisionLogError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, record


def write_jsonl(path: str | pathlib.Path, records) -> None:
    path = pathlib.Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
