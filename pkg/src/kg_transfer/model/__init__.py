from .vocab import (
    AGENT, AT_LOCATION, DIRECTIONS, UNKNOWN, WALL, Interner, Vocabulary,
)
from .triple import (
    MemoryItem, TemporalAnnotations, Triple,
    item_from_dict, item_to_dict, triple_from_dict, triple_to_dict,
)
from .graph_view import (
    RECALL_CAP, EdgeSource, GraphEdge, GraphMode, GraphView,
    annotation_features, build_graph_view,
)

__all__ = [
    "AGENT",
    "AT_LOCATION",
    "DIRECTIONS",
    "UNKNOWN",
    "WALL",
    "Interner",
    "Vocabulary",
    "MemoryItem",
    "TemporalAnnotations",
    "Triple",
    "item_from_dict",
    "item_to_dict",
    "triple_from_dict",
    "triple_to_dict",
    "RECALL_CAP",
    "EdgeSource",
    "GraphEdge",
    "GraphMode",
    "GraphView",
    "annotation_features",
    "build_graph_view",
]
