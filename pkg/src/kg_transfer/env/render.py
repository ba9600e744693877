from __future__ import annotations

from .layout import WorldLayout
from .room_env import HiddenState

CELL_WIDTH = 5


def render_birdseye(state: HiddenState, layout: WorldLayout) -> str:
    """
    ASCII schematic of the hidden state.

    '@' marks the agent, digits count objects in a room, '|' and '-----'
    mark walls closed at state.step (the outer boundary is always closed).
    A legend listing room contents follows the grid.
    """
    n = layout.grid_length
    counts = [0] * layout.num_rooms
    for room in state.object_rooms:
        counts[room] += 1
    closed_edges = {
        (w.a, w.b) for w, closed in zip(layout.walls, state.wall_states) if closed
    }

    def closed(a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in closed_edges

    horizontal_full = "+" + "+".join(["-" * CELL_WIDTH] * n) + "+"
    lines = [horizontal_full]
    for row in range(n):
        cells = "|"
        for col in range(n):
            room = row * n + col
            text = ("@" if room == state.agent_room else "") + (str(counts[room]) if counts[room] else "")
            cells += text.center(CELL_WIDTH)
            if col + 1 < n:
                cells += "|" if closed(room, room + 1) else " "
        lines.append(cells + "|")
        if row + 1 < n:
            sep = "+"
            for col in range(n):
                room = row * n + col
                sep += ("-" * CELL_WIDTH if closed(room, room + n) else " " * CELL_WIDTH) + "+"
            lines.append(sep)
    lines.append(horizontal_full)

    lines.append(f"step {state.step}  agent @ {layout.room_names[state.agent_room]}")
    for room, name in enumerate(layout.room_names):
        here = [obj for obj, r in zip(layout.object_names, state.object_rooms) if r == room]
        if here:
            lines.append(f"  {name}: {', '.join(here)}")
    return "\n".join(lines) + "\n"
