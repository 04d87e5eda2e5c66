"""First-move lookup table for agents that have no previous tile yet."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .geometry import RING8

CHART_HEADER = "SWEEP-CHARTS v1"


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    ident: str
    rotation: int  # quarter turns counter-clockwise
    tier: int  # 0 = drawn charts, 1 = supplementary section
    tiles: frozenset[tuple[int, int]]  # relative to the agent
    move: tuple[int, int]

    @property
    def mask(self) -> int:
        return ring_mask(self.tiles)


def ring_mask(tiles) -> int:
    """8-bit pattern of the ring around the origin, bit i = ``RING8[i]``."""
    return sum(1 << i for i, d in enumerate(RING8) if d in tiles)


def rotate(p: tuple[int, int], quarter_turns: int) -> tuple[int, int]:
    x, y = p
    for _ in range(quarter_turns % 4):
        x, y = -y, x
    return x, y


def parse_charts(text: str) -> list[Chart]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CHART_HEADER:
        raise ChartError(f"chart table must start with {CHART_HEADER!r}")
    blocks: list[tuple[str, list[str], int, int]] = []
    tier = 0
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip()
        if not line or line.startswith(";"):
            continue
        if line == "[supplementary]":
            tier = 1
        elif line.startswith("chart "):
            blocks.append((line.split(None, 1)[1], [], lineno, tier))
        elif not blocks:
            raise ChartError(f"line {lineno}: grid row outside a chart block")
        else:
            blocks[-1][1].append(line)

    charts = []
    for ident, rows, lineno, tier in blocks:
        cells, agent, dest = set(), None, None
        for r, row in enumerate(rows):
            y = len(rows) - 1 - r
            for x, ch in enumerate(row):
                if ch == ".":
                    continue
                if ch not in "#AD":
                    raise ChartError(f"chart {ident} (line {lineno}): bad cell {ch!r}")
                cells.add((x, y))
                if ch == "A":
                    agent = (x, y)
                elif ch == "D":
                    dest = (x, y)
        if agent is None or dest is None:
            raise ChartError(f"chart {ident} (line {lineno}): needs one A and one D")
        move = (dest[0] - agent[0], dest[1] - agent[1])
        if abs(move[0]) + abs(move[1]) != 1:
            raise ChartError(f"chart {ident}: destination is not a 4-neighbour")
        rel = frozenset((x - agent[0], y - agent[1]) for x, y in cells) - {(0, 0)}
        for q in range(4):
            charts.append(
                Chart(ident, q, tier, frozenset(rotate(p, q) for p in rel), rotate(move, q))
            )
    return charts


def build_table(charts: list[Chart]) -> dict[int, Chart]:
    """Map 8-neighbourhood masks to charts.

    Precedence: drawn charts before the supplementary section, unrotated
    before rotated copies, then file order.  Two unrotated charts of the
    same tier that disagree are a table error.
    """
    table: dict[int, Chart] = {}
    order = sorted(range(len(charts)), key=lambda i: (charts[i].tier, charts[i].rotation, i))
    for i in order:
        c = charts[i]
        old = table.get(c.mask)
        if old is None:
            table[c.mask] = c
        elif (
            old.move != c.move
            and old.rotation == c.rotation == 0
            and old.tier == c.tier
        ):
            raise ChartError(
                f"charts {old.ident} and {c.ident} disagree on pattern {c.mask:08b}"
            )
    return table


@lru_cache(maxsize=None)
def default_table() -> dict[int, Chart]:
    text = resources.files("antsweep").joinpath("data/initial_charts.txt").read_text()
    return build_table(parse_charts(text))


def lookup(mask: int) -> tuple[int, int]:
    """Move for a neighbourhood pattern; raises ``ChartError`` if uncharted."""
    try:
        return default_table()[mask].move
    except KeyError:
        pattern = "".join(
            "#" if mask >> i & 1 else "." for i in range(8)
        )
        raise ChartError(
            f"no first-move chart matches neighbourhood mask {mask:#04x} "
            f"(ring N,NE,E,SE,S,SW,W,NW = {pattern})"
        ) from None
