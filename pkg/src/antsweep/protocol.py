"""Per-agent decision logic of the SWEEP cleaning protocol.

Every decision function reads the world only through a :class:`SensorView`,
which refuses any query further than Manhattan distance 3 from the agent.
The functions are pure apart from the flag/waiting fields they set on the
agent they were called for.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import charts
from .geometry import DIRS4, RING8, Tile


SENSOR_RADIUS = 3

LEFT, DOWN, LEFT_DOWN, RIGHT_DOWN, RIGHT, UP = (
    "left", "down", "left-down", "right-down", "right", "up",
)

# Tags of the positions an agent waits on, as offsets from its tile.
WAIT_OFFSETS = {
    LEFT: (-1, 0),
    DOWN: (0, -1),
    LEFT_DOWN: (-1, -1),
    RIGHT_DOWN: (1, -1),
}


class SensorRangeError(RuntimeError):
    """The protocol asked about a tile outside the sensing sphere."""


class ProtocolError(RuntimeError):
    """The local picture contradicts a protocol precondition."""


@dataclass(eq=False)
class AgentState:
    id: int
    pos: Tile
    prev: Tile | None = None
    dest: Tile | None = None
    entry_tick: int = 0
    # priority of the move that brought the agent onto ``pos``
    entry_priority: int = 0
    resting: bool = False
    waiting: set[str] = field(default_factory=set)
    near_completion: bool = False
    saturated_perimeter: bool = False
    active_this_tick: bool = False
    inserted: bool = False
    stopped: bool = False
    # tags a neighbour released through a swap clause during this tick
    released: set[str] = field(default_factory=set)

    @property
    def present(self) -> bool:
        return self.inserted and not self.stopped

    def dest_direction(self) -> tuple[int, int] | None:
        if self.dest is None:
            return None
        return (self.dest[0] - self.pos[0], self.dest[1] - self.pos[1])


class SensorView:
    """Range-limited window on the world centred at one agent's tile.

    ``tiles`` is the set of contaminated tiles and ``occupancy`` maps a tile
    to the agents standing on it; both are read, never written.
    """

    __slots__ = ("center", "_tiles", "_occ", "max_distance")

    def __init__(self, center: Tile, tiles, occupancy):
        self.center = center
        # a Region exposes its raw set; lookups go straight to it
        self._tiles = getattr(tiles, "_tiles", tiles)
        self._occ = occupancy
        self.max_distance = 0

    def _check(self, t, reach: int = 0) -> None:
        """Reject ``t`` (or any tile within ``reach`` steps of it) beyond the radius."""
        d = abs(t[0] - self.center[0]) + abs(t[1] - self.center[1]) + reach
        if d > SENSOR_RADIUS:
            if reach:
                # only the sensed ring cells matter; find the first violating one
                x, y = t
                for dx, dy in RING8:
                    self._check((x + dx, y + dy))
                return
            raise SensorRangeError(
                f"query of {tuple(t)} from {tuple(self.center)} (distance {d})"
            )
        if d > self.max_distance:
            self.max_distance = d

    def contaminated(self, t) -> bool:
        self._check(t)
        return t in self._tiles

    def agents_at(self, t) -> list[AgentState]:
        self._check(t)
        return self._occ.get(t, ())

    def _ring(self, t) -> list[bool]:
        self._check(t, reach=2)
        x, y = t
        tiles = self._tiles
        return [(x + dx, y + dy) in tiles for dx, dy in RING8]

    def is_boundary(self, t) -> bool:
        if not self.contaminated(t):
            return False
        return not all(self._ring(t))

    def ring_mask(self, t) -> int:
        """Bit ``i`` set iff the ``RING8[i]`` neighbour of ``t`` is contaminated."""
        return sum(1 << i for i, c in enumerate(self._ring(t)) if c)

    def is_critical(self, t) -> bool:
        occ = self._ring(t)
        if sum(occ[0::2]) < 2 or all(occ):
            return False
        start = occ.index(False)
        run, prev, runs = 0, False, set()
        for i in range(1, 9):
            j = (start + i) % 8
            if occ[j]:
                if not prev:
                    run += 1
                if j % 2 == 0:
                    runs.add(run)
            prev = occ[j]
        return len(runs) > 1

    def contaminated_neighbors(self, t) -> list[Tile]:
        x, y = t
        out = []
        for dx, dy in DIRS4:
            n = Tile(x + dx, y + dy)
            if self.contaminated(n):
                out.append(n)
        return out


def priority(src, dst) -> int:
    return 2 * (dst[0] - src[0]) + (dst[1] - src[1])


def rightmost_neighbor(pos: Tile, prev: Tile, view: SensorView) -> Tile:
    """Next tile of the clockwise boundary traversal.

    The four neighbours of ``pos`` are scanned clockwise starting after
    ``prev``.  The first boundary tile is taken, except when ``prev`` is a
    contaminated interior tile (the region grew around the agent), in which
    case the second boundary tile met is taken.  ``prev`` itself comes last
    in the scan, so it is returned only when nothing else qualifies.
    """
    back = (prev[0] - pos[0], prev[1] - pos[1])
    try:
        k = DIRS4.index(back)
    except ValueError:
        raise ProtocolError(f"{tuple(prev)} is not a 4-neighbour of {tuple(pos)}") from None
    prev_interior = view.contaminated(prev) and not view.is_boundary(prev)
    found = []
    for i in range(1, 5):
        dx, dy = DIRS4[(k + i) % 4]
        n = Tile(pos[0] + dx, pos[1] + dy)
        if view.is_boundary(n):
            found.append(n)
    if not found:
        raise ProtocolError(f"no boundary 4-neighbour around {tuple(pos)}")
    if prev_interior and len(found) > 1:
        return found[1]
    return found[0]


def neighborhood_mask(pos, view: SensorView) -> int:
    return view.ring_mask(pos)


def initial_move(pos: Tile, view: SensorView) -> Tile:
    """First destination of an agent that has no previous tile, from the charts."""
    dx, dy = charts.lookup(neighborhood_mask(pos, view))
    return Tile(pos[0] + dx, pos[1] + dy)


def choose_destination(agent: AgentState, view: SensorView) -> Tile:
    if agent.prev is None:
        return initial_move(agent.pos, view)
    return rightmost_neighbor(agent.pos, agent.prev, view)


def _precedes(other: AgentState, agent: AgentState) -> bool:
    if other.entry_tick != agent.entry_tick:
        return other.entry_tick < agent.entry_tick
    if other.entry_priority != agent.entry_priority:
        return other.entry_priority > agent.entry_priority
    return other.id < agent.id


def compute_resting(agent: AgentState, view: SensorView) -> bool:
    """Yield to a co-located agent heading the same way that has precedence.

    Precedence: earlier entry to the tile, then higher entry priority,
    then lower id.
    """
    if agent.dest is None:
        return False
    for other in view.agents_at(agent.pos):
        if other is agent or not other.present or other.dest != agent.dest:
            continue
        if _precedes(other, agent):
            return True
    return False


def is_active(a: AgentState) -> bool:
    """Non-resting, present, holding a destination, and not yet moved this tick."""
    return a.present and a.active_this_tick and not a.resting and a.dest is not None


def _active_at(view: SensorView, t) -> list[AgentState]:
    return [a for a in view.agents_at(t) if is_active(a)]


def compute_waiting(
    agent: AgentState, view: SensorView
) -> tuple[set[str], list[tuple[AgentState, str]]]:
    """Waiting tags for ``agent``, plus ``(neighbour, tag)`` pairs it releases.

    A swap clause makes ``agent`` wait for the agent it is about to step
    onto and removes that agent's ``left`` (or ``down``) wait on it.  Tags
    released to ``agent`` earlier in the tick are left out.
    """
    x, y = agent.pos
    waiting: set[str] = set()
    for tag, (dx, dy) in WAIT_OFFSETS.items():
        t = (x + dx, y + dy)
        if view.contaminated(t) and _active_at(view, t):
            waiting.add(tag)

    def heading(a: AgentState):
        return a.dest_direction()

    released: list[tuple[AgentState, str]] = []
    d = agent.dest_direction()
    if d == (1, 0):
        right = _active_at(view, (x + 1, y))
        if (
            right
            and all(heading(j) != (-1, 0) for j in right)
            and not any(heading(l) == (1, 0) for l in _active_at(view, (x - 1, y)))
            and not any(_active_at(view, t) for t in ((x, y + 1), (x + 1, y + 1), (x - 1, y + 1)))
        ):
            waiting.add(RIGHT)
            released = [(j, LEFT) for j in right]
    elif d == (0, 1):
        up = _active_at(view, (x, y + 1))
        if (
            up
            and all(heading(j) != (0, -1) for j in up)
            and not any(heading(l) == (0, 1) for l in _active_at(view, (x, y - 1)))
            and not any(_active_at(view, t) for t in ((x + 1, y), (x + 1, y + 1), (x - 1, y + 1)))
        ):
            waiting.add(UP)
            released = [(j, DOWN) for j in up]
    waiting -= agent.released
    return waiting, released


def should_clean(agent: AgentState, view: SensorView, pivot: Tile) -> bool:
    """Clean the tile being left: a non-critical boundary tile no one else stands on."""
    pos = agent.pos
    if pos == pivot or not view.is_boundary(pos):
        return False
    if view.is_critical(pos):
        return False
    return not any(a is not agent and a.present for a in view.agents_at(pos))


def check_completion(agent: AgentState, view: SensorView, pivot: Tile) -> bool:
    """True (stop) iff the agent is on the pivot and no contaminated 4-neighbour remains."""
    return agent.pos == pivot and not view.contaminated_neighbors(agent.pos)


def _occupied(view: SensorView, t, at_least: int = 1) -> bool:
    return sum(1 for a in view.agents_at(t) if a.present) >= at_least


def near_completion_flag(agent: AgentState, view: SensorView) -> bool:
    return all(_occupied(view, n) for n in view.contaminated_neighbors(agent.pos))


def saturated_flag(agent: AgentState, view: SensorView, pivot: Tile) -> bool:
    pos = agent.pos
    if not _occupied(view, pos, 2) or not view.is_boundary(pos):
        return False
    for n in view.contaminated_neighbors(pos):
        if not view.is_boundary(n) or n == pivot or view.is_critical(n):
            continue
        if not _occupied(view, n, 2):
            return False
    return True


def _tile_flag(view: SensorView, t, name: str) -> bool:
    return any(getattr(a, name) for a in view.agents_at(t) if a.present)


def near_completion_stop(agent: AgentState, view: SensorView) -> bool:
    """Every contaminated 4-neighbour holds an agent whose near-completion flag is set."""
    return agent.near_completion and all(
        _tile_flag(view, n, "near_completion") for n in view.contaminated_neighbors(agent.pos)
    )


def ignore_resting(agent: AgentState, view: SensorView) -> bool:
    pos = agent.pos
    if not agent.saturated_perimeter or not view.is_boundary(pos):
        return False
    return all(
        _tile_flag(view, n, "saturated_perimeter")
        for n in view.contaminated_neighbors(pos)
        if view.is_boundary(n)
    )


def check_near_completion(agent: AgentState, view: SensorView, pivot: Tile) -> bool:
    """Refresh both flags on ``agent`` and report whether it should clean and stop.

    The engine evaluates the flags of all agents before any stop decision,
    so the neighbours' flags read here belong to the same tick; calling this
    for a single agent in isolation reads whatever flags its neighbours
    currently carry.
    """
    agent.near_completion = near_completion_flag(agent, view)
    agent.saturated_perimeter = saturated_flag(agent, view, pivot)
    return near_completion_stop(agent, view)
