"""Contaminated regions on the infinite integer grid.

Coordinates are ``(x, y)`` with ``y`` growing upwards. A region is the
finite set of contaminated tiles; everything else on the grid is clean.

Connectivity conventions used throughout the package:

* the region itself is 4-connected;
* its complement is taken 8-connected, so a clean tile touching the
  outside only through a corner is *not* a hole.  This is the dual
  pairing that makes cleaning a non-critical boundary tile safe.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, NamedTuple

import numpy as np
from scipy import ndimage


_EIGHT = np.ones((3, 3), dtype=bool)
_CROSS = ndimage.generate_binary_structure(2, 1)


class Tile(NamedTuple):
    x: int
    y: int


# Clockwise order with y up: north, east, south, west.
DIRS4: tuple[tuple[int, int], ...] = ((0, 1), (1, 0), (0, -1), (-1, 0))
DIR_NAMES = ("up", "right", "down", "left")

# The 8-neighbourhood as a clockwise ring starting at north.
RING8: tuple[tuple[int, int], ...] = (
    (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1),
)


class RegionError(ValueError):
    """A region violates a structural invariant (connectivity, holes, ...)."""


def neighbors4(t: tuple[int, int]) -> list[Tile]:
    x, y = t
    return [Tile(x + dx, y + dy) for dx, dy in DIRS4]


def neighbors8(t: tuple[int, int]) -> list[Tile]:
    x, y = t
    return [Tile(x + dx, y + dy) for dx, dy in RING8]


class Region:
    """A mutable finite set of contaminated tiles with cached geometry.

    Cached quantities are dropped on every mutation, so reading them
    always agrees with a recomputation from scratch.
    """

    __slots__ = ("_tiles", "_cache")

    def __init__(self, tiles: Iterable[tuple[int, int]] = ()):
        self._tiles: set[Tile] = {Tile(*t) for t in tiles}
        self._cache: dict = {}

    @classmethod
    def rectangle(cls, width: int, height: int, x0: int = 0, y0: int = 0) -> Region:
        return cls((x0 + i, y0 + j) for i in range(width) for j in range(height))

    # -- set protocol -----------------------------------------------------
    def __contains__(self, t) -> bool:
        return t in self._tiles

    def __len__(self) -> int:
        return len(self._tiles)

    def __iter__(self) -> Iterator[Tile]:
        return iter(self._tiles)

    def __eq__(self, other) -> bool:
        if isinstance(other, Region):
            return self._tiles == other._tiles
        return NotImplemented

    def __repr__(self) -> str:
        return f"Region({len(self._tiles)} tiles)"

    @property
    def tiles(self) -> frozenset[Tile]:
        return frozenset(self._tiles)

    @property
    def area(self) -> int:
        return len(self._tiles)

    def copy(self) -> Region:
        r = Region()
        r._tiles = set(self._tiles)
        return r

    def add(self, t: tuple[int, int]) -> None:
        self._tiles.add(Tile(*t))
        self._cache.clear()

    def discard(self, t: tuple[int, int]) -> None:
        self._tiles.discard(Tile(*t))
        self._cache.clear()

    def update(self, tiles: Iterable[tuple[int, int]]) -> None:
        self._tiles.update(Tile(*t) for t in tiles)
        self._cache.clear()

    def _cached(self, key, fn):
        try:
            return self._cache[key]
        except KeyError:
            value = self._cache[key] = fn(self)
            return value

    # -- cached geometry --------------------------------------------------
    @property
    def boundary(self) -> frozenset[Tile]:
        return self._cached("boundary", _boundary)

    @property
    def depth(self) -> int:
        return self._cached("depth", _depth)

    @property
    def perimeter_length(self) -> int:
        return self._cached("perimeter_length", _perimeter_length)

    @property
    def bounding_rect_perimeter(self) -> int:
        return self._cached("bounding_rect_perimeter", _bounding_rect_perimeter)

    def bbox(self) -> tuple[int, int, int, int]:
        """``(xmin, ymin, xmax, ymax)`` of a nonempty region."""
        if not self._tiles:
            raise RegionError("empty region has no bounding box")
        xs = [t.x for t in self._tiles]
        ys = [t.y for t in self._tiles]
        return min(xs), min(ys), max(xs), max(ys)


def _as_set(region) -> set | frozenset:
    return region._tiles if isinstance(region, Region) else region


def is_boundary_tile(t: tuple[int, int], tiles) -> bool:
    """True iff ``t`` is contaminated and has a clean 8-neighbour."""
    if t not in tiles:
        return False
    x, y = t
    for dx, dy in RING8:
        if (x + dx, y + dy) not in tiles:
            return True
    return False


def _boundary(region) -> frozenset[Tile]:
    tiles = _as_set(region)
    return frozenset(t for t in tiles if is_boundary_tile(t, tiles))


def boundary(region: Region) -> frozenset[Tile]:
    """Tiles of the region with at least one clean 8-neighbour."""
    if isinstance(region, Region):
        return region.boundary
    return _boundary(region)


def _bfs(tiles, sources: Iterable[tuple[int, int]]) -> dict[Tile, int]:
    dist: dict[Tile, int] = {}
    queue: deque = deque()
    for s in sources:
        s = Tile(*s)
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        t = queue.popleft()
        nd = dist[t] + 1
        for n in neighbors4(t):
            if n in tiles and n not in dist:
                dist[n] = nd
                queue.append(n)
    return dist


def _depth(region) -> int:
    tiles = _as_set(region)
    if not tiles:
        raise RegionError("depth of an empty region is undefined")
    dist = _bfs(tiles, _boundary(tiles))
    if len(dist) != len(tiles):
        raise RegionError("region is not 4-connected")
    return max(dist.values())


def depth(region: Region) -> int:
    """Largest within-region 4-path distance from a tile to the boundary."""
    if isinstance(region, Region):
        return region.depth
    return _depth(region)


def is_connected(region) -> bool:
    tiles = _as_set(region)
    if len(tiles) < 2:
        return True
    a, _, _ = to_array(tiles)
    _, n = ndimage.label(a, structure=_CROSS)
    return n == 1


def has_holes(region) -> bool:
    """True iff the complement has a finite 8-connected component."""
    tiles = _as_set(region)
    if not tiles:
        return False
    a, _, _ = to_array(tiles, pad=1)
    return bool((ndimage.binary_fill_holes(a, structure=_EIGHT) != a).any())


def can_add(t: tuple[int, int], tiles) -> bool:
    """Would adding clean tile ``t`` keep a hole-free region connected and hole-free?

    ``t`` must touch the region along an edge, and the clean cells of its
    8-ring must form a single 8-connected group inside the ring.  For a
    hole-free region that local test is exact: two separate clean groups
    could only meet again around the far side of a contaminated arc.
    """
    tiles = _as_set(tiles)
    x, y = t
    if t in tiles or not any(n in tiles for n in neighbors4(t)):
        return False
    clean = [(x + dx, y + dy) not in tiles for dx, dy in RING8]
    groups = 0
    seen = [False] * 8
    for i in range(8):
        if not clean[i] or seen[i]:
            continue
        groups += 1
        stack = [i]
        seen[i] = True
        while stack:
            j = stack.pop()
            # ring neighbours, plus the edge cell two steps away (diagonal pair)
            links = [(j + 1) % 8, (j - 1) % 8]
            if j % 2 == 0:
                links += [(j + 2) % 8, (j - 2) % 8]
            for m in links:
                if clean[m] and not seen[m]:
                    seen[m] = True
                    stack.append(m)
    return groups == 1


def is_simply_connected(region) -> bool:
    """4-connected with no holes in the (8-connected) complement."""
    tiles = _as_set(region)
    if not tiles:
        return True
    a, _, _ = to_array(tiles, pad=1)
    _, n = ndimage.label(a, structure=_CROSS)
    return n == 1 and not (ndimage.binary_fill_holes(a, structure=_EIGHT) != a).any()


def is_critical(t: tuple[int, int], region) -> bool:
    """Would cleaning ``t`` split its contaminated 4-neighbours apart?

    Decided locally: the contaminated 4-neighbours must all lie in one run
    of consecutive contaminated tiles around the 8-neighbourhood ring.
    """
    tiles = _as_set(region)
    if t not in tiles:
        raise RegionError(f"tile {tuple(t)} is not in the region")
    return _is_critical(t, tiles)


def _is_critical(t, tiles) -> bool:
    x, y = t
    occ = [(x + dx, y + dy) in tiles for dx, dy in RING8]
    if sum(occ[0::2]) < 2:
        return False
    if all(occ):
        return False
    # Rotate so the ring starts right after a clean tile, then label runs.
    start = occ.index(False)
    run = 0
    runs_with_4n: set[int] = set()
    prev = False
    for i in range(1, 9):
        j = (start + i) % 8
        if occ[j]:
            if not prev:
                run += 1
            if j % 2 == 0:
                runs_with_4n.add(run)
        prev = occ[j]
    return len(runs_with_4n) > 1


def _perimeter_walk(tiles) -> list[Tile]:
    """Closed clockwise boundary walk as a list of visited tiles.

    Starts on the lexicographically smallest boundary tile, entering as if
    from its (clean) west side, and follows the first-boundary-tile
    clockwise scan.  Returned list is one period of the cycle.
    """
    bnd = _boundary(tiles)
    start = min(bnd)
    if len(tiles) == 1:
        return [start]
    state = (start, Tile(start.x - 1, start.y))
    seen: dict[tuple[Tile, Tile], int] = {}
    states: list[tuple[Tile, Tile]] = []
    while state not in seen:
        seen[state] = len(states)
        states.append(state)
        pos, prev = state
        state = (_first_boundary_cw(pos, prev, bnd), pos)
    cycle = states[seen[state]:]
    return [s[0] for s in cycle]


def _first_boundary_cw(pos, prev, bnd) -> Tile:
    back = (prev[0] - pos[0], prev[1] - pos[1])
    k = DIRS4.index(back)
    for i in range(1, 5):
        dx, dy = DIRS4[(k + i) % 4]
        n = Tile(pos[0] + dx, pos[1] + dy)
        if n in bnd:
            return n
    raise RegionError(f"no boundary 4-neighbour around {tuple(pos)}")


def _perimeter_length(region) -> int:
    tiles = _as_set(region)
    if not tiles:
        raise RegionError("perimeter of an empty region is undefined")
    if not is_simply_connected(tiles):
        raise RegionError("perimeter walk requires a simply connected region")
    return len(_perimeter_walk(tiles))


def perimeter_length(region: Region) -> int:
    """Step count ``c0`` of the closed clockwise boundary-following walk."""
    if isinstance(region, Region):
        return region.perimeter_length
    return _perimeter_length(region)


def perimeter_walk(region: Region) -> list[Tile]:
    tiles = _as_set(region)
    if not is_simply_connected(tiles) or not tiles:
        raise RegionError("perimeter walk requires a nonempty simply connected region")
    return _perimeter_walk(tiles)


def _bounding_rect_perimeter(region) -> int:
    tiles = _as_set(region)
    if not tiles:
        raise RegionError("empty region has no bounding rectangle")
    xs = [t[0] for t in tiles]
    ys = [t[1] for t in tiles]
    return 2 * ((max(xs) - min(xs) + 1) + (max(ys) - min(ys) + 1))


def bounding_rect_perimeter(region: Region) -> int:
    if isinstance(region, Region):
        return region.bounding_rect_perimeter
    return _bounding_rect_perimeter(region)


def region_radius(region: Region) -> int:
    """Minimum over tiles of the largest within-region 4-path distance."""
    tiles = _as_set(region)
    if not tiles:
        raise RegionError("radius of an empty region is undefined")
    best = None
    for t in tiles:
        dist = _bfs(tiles, [t])
        if len(dist) != len(tiles):
            raise RegionError("region is not 4-connected")
        ecc = max(dist.values())
        if best is None or ecc < best:
            best = ecc
    return best


def to_array(tiles, pad: int = 0) -> tuple[np.ndarray, int, int]:
    """Dense boolean window ``a[x - x0, y - y0]`` over the bounding box."""
    pts = np.array(list(tiles), dtype=np.int64).reshape(-1, 2)
    x0, y0 = pts.min(axis=0) - pad
    hi = pts.max(axis=0) + pad
    a = np.zeros((hi[0] - x0 + 1, hi[1] - y0 + 1), dtype=bool)
    a[pts[:, 0] - x0, pts[:, 1] - y0] = True
    return a, int(x0), int(y0)


def spread(region: Region) -> Region:
    """One contamination spread: 4-dilation, then enclosed pockets are filled."""
    tiles = _as_set(region)
    if not tiles:
        return Region()
    a, x0, y0 = to_array(tiles, pad=1)
    grown = ndimage.binary_dilation(a, structure=_CROSS)
    filled = ndimage.binary_fill_holes(grown, structure=_EIGHT)
    xs, ys = np.nonzero(filled)
    return Region(zip((xs + x0).tolist(), (ys + y0).tolist()))


# -- REGION v1 text format ---------------------------------------------------

HEADER = "REGION v1"


def serialize(region: Region) -> str:
    """Cropped text form: header, then rows top (max y) to bottom."""
    tiles = _as_set(region)
    if not tiles:
        return f"{HEADER} 0 0\n"
    xs = [t[0] for t in tiles]
    ys = [t[1] for t in tiles]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    lines = [f"{HEADER} {x1 - x0 + 1} {y1 - y0 + 1}"]
    for y in range(y1, y0 - 1, -1):
        lines.append("".join("#" if (x, y) in tiles else "." for x in range(x0, x1 + 1)))
    return "\n".join(lines) + "\n"


def parse(text: str, origin: tuple[int, int] = (0, 0), check: bool = True) -> Region:
    """Parse REGION v1 text; the bottom-left cell of the grid lands on ``origin``."""
    if not text.endswith("\n"):
        raise RegionError("region file must end with a newline")
    lines = text[:-1].split("\n")
    head = lines[0].split(" ")
    if len(head) != 4 or " ".join(head[:2]) != HEADER:
        raise RegionError(f"bad header line: {lines[0]!r}")
    try:
        width, height = int(head[2]), int(head[3])
    except ValueError:
        raise RegionError(f"bad header line: {lines[0]!r}") from None
    if width < 0 or height < 0:
        raise RegionError("negative dimensions")
    rows = lines[1:] if height else [r for r in lines[1:] if r]
    if len(rows) != height:
        raise RegionError(f"expected {height} rows, found {len(rows)}")
    tiles = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise RegionError(f"row {r + 2} has {len(row)} cells, expected {width}")
        y = origin[1] + height - 1 - r
        for c, ch in enumerate(row):
            if ch == "#":
                tiles.append((origin[0] + c, y))
            elif ch != ".":
                raise RegionError(f"row {r + 2}: unexpected character {ch!r}")
    region = Region(tiles)
    if check and tiles and not is_simply_connected(region):
        raise RegionError("region is not simply connected")
    return region
