from .loader import iter_jsonl, load_config, parse_config, write_jsonl

__all__ = ["iter_jsonl", "load_config", "parse_config", "write_jsonl"]
