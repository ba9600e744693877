from __future__ import annotations

import pathlib
from typing import Callable, Iterable, Sequence

from ..env.layout import EntityCategory
from ..model.triple import MemoryItem, Triple, item_to_dict
from ..model.vocab import Vocabulary
from ..parser.loader import write_jsonl
from .store import LongTermStore

CATEGORY_COLORS: dict[EntityCategory, str] = {
    EntityCategory.ROOM:          "#f6e27f",   # yellow
    EntityCategory.AGENT:         "#b08fd8",   # purple
    EntityCategory.STATIC_OBJECT: "#7fb2e5",   # blue
    EntityCategory.MOVING_OBJECT: "#8fd18f",   # green
    EntityCategory.WALL:          "#bdbdbd",   # grey
    EntityCategory.UNKNOWN:       "#ffffff",
}


def store_to_jsonl(
    store: LongTermStore | Iterable[MemoryItem], vocab: Vocabulary, path: str | pathlib.Path,
) -> None:
    """Write every stored item, in insertion order, as one JSON object per line."""
    write_jsonl(path, (item_to_dict(m, vocab) for m in store))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def memory_to_dot(
    items: Iterable[MemoryItem],
    vocab: Vocabulary,
    categorize: Callable[[str], EntityCategory] | None = None,
    title: str | None = None,
) -> str:
    """
    Graphviz view of a memory state.

    Items sharing a main triple collapse into one edge whose label carries
    "(N)" when N > 1; the tooltip lists each copy's annotations.
    """
    grouped: dict[Triple, list[MemoryItem]] = {}
    for item in items:
        grouped.setdefault(item.triple, []).append(item)

    node_labels: list[str] = []
    for triple in grouped:
        for eid in (triple.head, triple.tail):
            label = vocab.entities.label_of(eid)
            if label not in node_labels:
                node_labels.append(label)

    lines = ["digraph memory {"]
    if title:
        lines.append(f"  label={_quote(title)};")
        lines.append("  labelloc=t;")
    lines.append("  node [shape=ellipse, style=filled];")
    for label in node_labels:
        category = categorize(label) if categorize else EntityCategory.UNKNOWN
        lines.append(
            f"  {_quote(label)} [fillcolor={_quote(CATEGORY_COLORS[category])}, "
            f"category={_quote(category.value)}];"
        )
    for triple, copies in grouped.items():
        relation = vocab.relations.label_of(triple.relation)
        edge_label = relation if len(copies) == 1 else f"{relation} ({len(copies)})"
        tooltip = " | ".join(
            f"time_added={m.annotations.time_added}, last_accessed={m.annotations.last_accessed}, "
            f"num_recalled={m.annotations.num_recalled}"
            for m in copies
        )
        lines.append(
            f"  {_quote(vocab.entities.label_of(triple.head))} -> "
            f"{_quote(vocab.entities.label_of(triple.tail))} "
            f"[label={_quote(edge_label)}, tooltip={_quote(tooltip)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def memory_state_to_dot(
    short: Sequence[MemoryItem],
    long: Sequence[MemoryItem],
    vocab: Vocabulary,
    categorize: Callable[[str], EntityCategory] | None = None,
    title: str | None = None,
) -> str:
    return memory_to_dot([*short, *long], vocab, categorize, title)
