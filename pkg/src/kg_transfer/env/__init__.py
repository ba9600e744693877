from .layout import EntityCategory, Wall, WorldLayout, build_layout, wall_closed
from .room_env import MOVES, HiddenState, Observation, Query, RoomEnv, StepResult
from .render import render_birdseye

__all__ = [
    "EntityCategory",
    "Wall",
    "WorldLayout",
    "build_layout",
    "wall_closed",
    "MOVES",
    "HiddenState",
    "Observation",
    "Query",
    "RoomEnv",
    "StepResult",
    "render_birdseye",
]
