"""Region corpora, batch experiments and trace rendering."""

from __future__ import annotations

import csv
import io
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from . import bounds, geometry
from .engine import (
    SimConfig,
    TraceError,
    TraceEvent,
    evaluate_bounds,
    run,
)
from .geometry import Region, RegionError, Tile

SHAPES = ("square", "disk", "line", "random-tree-grown")


def generate_region(seed: int, target_area: int, shape: str) -> Region:
    """A simply connected region of exactly ``target_area`` tiles.

    Only ``random-tree-grown`` uses the seed; the other classes are fixed
    shapes.
    """
    if target_area < 1:
        raise ValueError("target_area must be >= 1")
    if shape == "square":
        return _square(target_area)
    if shape == "disk":
        return _disk(target_area)
    if shape == "line":
        return Region((x, 0) for x in range(target_area))
    if shape == "random-tree-grown":
        return _tree_grown(random.Random(seed), target_area)
    raise ValueError(f"unknown shape class {shape!r}; expected one of {', '.join(SHAPES)}")


def _square(n: int) -> Region:
    side = math.isqrt(n)
    tiles = [(x, y) for y in range(side) for x in range(side)]
    # leftovers go on top, row by row from the left
    extra = n - side * side
    y = side
    while extra:
        row = min(extra, side + 1)
        tiles.extend((x, y) for x in range(row))
        extra -= row
        y += 1
    return Region(tiles)


def _disk(n: int) -> Region:
    r = math.isqrt(n) + 2
    pts = [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)]
    pts.sort(key=lambda p: (p[0] * p[0] + p[1] * p[1], math.atan2(p[1], p[0])))
    return Region(pts[:n])


def _tree_grown(rng: random.Random, n: int) -> Region:
    tiles = {Tile(0, 0)}
    frontier: list[Tile] = []
    index: dict[Tile, int] = {}

    def push(t: Tile) -> None:
        if t not in tiles and t not in index:
            index[t] = len(frontier)
            frontier.append(t)

    def pop(i: int) -> Tile:
        t = frontier[i]
        last = frontier.pop()
        if last != t:
            frontier[i] = last
            index[last] = i
        del index[t]
        return t

    for nb in geometry.neighbors4((0, 0)):
        push(nb)
    while len(tiles) < n:
        i = rng.randrange(len(frontier))
        c = frontier[i]
        if not geometry.can_add(c, tiles):
            continue
        pop(i)
        tiles.add(c)
        for nb in geometry.neighbors4(c):
            push(nb)
    return Region(tiles)


# -- batch experiments -------------------------------------------------------

RESULTS_SCHEMA = "antsweep-results/1"
RESULTS_HEADER = (
    "schema", "region", "S0", "c0", "boundary_card", "W", "R", "k", "d",
    "classification", "static_bound", "dynamic_bound", "outcome", "cover_time",
    "spreads", "static_satisfied", "dynamic_satisfied", "area_checks",
    "area_violations", "invariant_violations", "error",
)


class GeneratedRegion(NamedTuple):
    seed: int
    area: int
    shape: str

    def label(self) -> str:
        return f"gen:{self.shape}:{self.area}:{self.seed}"



@dataclass(frozen=True)
class ExperimentSpec:
    corpus: tuple
    ks: tuple[int, ...]
    ds: tuple[float, ...] = (math.inf,)
    # None: the engine default; an integer: a fixed tick budget
    horizon: int | None = None
    jobs: int = 1
    check_invariants: bool = True

    def __post_init__(self):
        if not self.corpus or not self.ks or not self.ds:
            raise ValueError("corpus, k list and d list must all be nonempty")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def cells(self) -> list[tuple]:
        return [(src, k, d) for src in self.corpus for k in self.ks for d in self.ds]


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[dict, ...]

    @property
    def invariant_violations(self) -> int:
        return sum(int(r["invariant_violations"] or 0) for r in self.rows)

    @property
    def area_violations(self) -> int:
        return sum(int(r["area_violations"] or 0) for r in self.rows)

    @property
    def bound_failures(self) -> int:
        return sum(
            1 for r in self.rows
            if r["static_satisfied"] == "false" or r["dynamic_satisfied"] == "false"
        )

    @property
    def errors(self) -> int:
        return sum(1 for r in self.rows if r["error"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=RESULTS_HEADER, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def summary(self) -> str:
        outcomes: dict[str, int] = {}
        for r in self.rows:
            key = r["outcome"] or "error"
            outcomes[key] = outcomes.get(key, 0) + 1
        parts = ", ".join(f"{k}={v}" for k, v in sorted(outcomes.items()))
        return (
            f"rows={len(self.rows)} ({parts}); invariant violations="
            f"{self.invariant_violations}; area-bound violations={self.area_violations}; "
            f"bound failures={self.bound_failures}; errors={self.errors}\n"
        )


def _fmt_bool(v) -> str:
    return "" if v is None else ("true" if v else "false")


def _fmt_float(v) -> str:
    return "" if v is None else repr(float(v))


def _fmt_d(d: float) -> str:
    return "inf" if math.isinf(d) else str(int(d))


def _load_source(src) -> tuple[str, Region]:
    if isinstance(src, GeneratedRegion):
        return src.label(), generate_region(src.seed, src.area, src.shape)
    path = Path(src)
    return str(src), geometry.parse(path.read_text())


def _run_cell(cell: tuple, horizon: int | None, check: bool) -> dict:
    src, k, d = cell
    row = dict.fromkeys(RESULTS_HEADER, "")
    row.update(schema=RESULTS_SCHEMA, k=str(k), d=_fmt_d(d))
    try:
        label, region = _load_source(src)
    except (OSError, RegionError, ValueError) as e:
        row.update(region=str(src), error=f"{type(e).__name__}: {e}")
        return row
    row["region"] = label
    try:
        res = run(SimConfig(region, k, d, horizon=horizon, trace=False, check_invariants=check))
    except Exception as e:  # a row failure must not stop the batch
        row["error"] = f"{type(e).__name__}: {e}"
        return row
    rep = res.bound_report
    inp = rep.inputs
    row.update(
        S0=str(inp.S0), c0=str(inp.c0), boundary_card=str(inp.boundary_card),
        W=str(inp.W), R=str(rep.R),
        classification=rep.feasibility.label(),
        static_bound=_fmt_float(rep.static_bound),
        dynamic_bound=_fmt_float(rep.dynamic.value if rep.dynamic else None),
        outcome=res.outcome.kind,
        cover_time="" if rep.cover_time is None else str(rep.cover_time),
        spreads=str(rep.spread_events),
        static_satisfied=_fmt_bool(rep.static_satisfied),
        dynamic_satisfied=_fmt_bool(rep.dynamic_satisfied),
        area_checks=str(rep.area_checks),
        area_violations=str(rep.area_violations),
        invariant_violations=str(len(res.violations)),
    )
    return row


def _run_cell_star(args):
    return _run_cell(*args)


def run_experiment(spec: ExperimentSpec, out: Path | None = None) -> ExperimentReport:
    """One results row per (region, k, d), in spec order."""
    cells = spec.cells()
    args = [(c, spec.horizon, spec.check_invariants) for c in cells]
    if spec.jobs == 1:
        rows = [_run_cell_star(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_run_cell_star, args))
    report = ExperimentReport(tuple(rows))
    if out is not None:
        Path(out).write_text(report.to_csv())
    return report


def row_flags_consistent(row: dict) -> bool:
    """Recompute a row's bound-satisfied flags from its own columns."""
    covered = row["outcome"] == "covered"
    T = int(row["cover_time"]) if row["cover_time"] else None
    if row["spreads"] == "0" and row["outcome"]:
        want = covered and T <= float(row["static_bound"]) + bounds.TICK_SLACK
        if row["static_satisfied"] != _fmt_bool(want):
            return False
    elif row["static_satisfied"] != "":
        return False
    if row["dynamic_bound"] and row["outcome"]:
        want = covered and T <= float(row["dynamic_bound"]) + bounds.TICK_SLACK
        if row["dynamic_satisfied"] != _fmt_bool(want):
            return False
    elif row["dynamic_satisfied"] != "":
        return False
    return True


def bounds_report(region: Region, k: int, d: float) -> dict:
    """Bound evaluation for a region, without simulating."""
    inputs, R, radius, t_static, dyn, feas = evaluate_bounds(region, k, d, with_radius=True)
    out = {
        "S0": inputs.S0, "c0": inputs.c0, "boundary_card": inputs.boundary_card,
        "W": inputs.W, "k": k, "d": None if math.isinf(d) else int(d),
        "R": R, "radius": radius, "static_bound": t_static,
        "classification": feas.label(), "notes": list(feas.notes),
    }
    if dyn is not None:
        out["dynamic_bound"] = dyn.value
        out["dynamic_discriminant"] = dyn.discriminant
        out["dynamic_roots"] = list(dyn.roots)
        if dyn.reason:
            out["dynamic_reason"] = dyn.reason
        if dyn.params is not None:
            out["gamma"] = {
                name: getattr(dyn.params, name)
                for name in ("gamma2", "gamma1", "gamma", "A1", "A2", "A3", "A4")
            }
    return out


# -- rendering ---------------------------------------------------------------

COLORS = {
    "clean": (255, 255, 255),
    "contaminated": (150, 150, 150),
    "critical": (90, 90, 90),
    "pivot": (40, 110, 220),
    "agent": (220, 40, 40),
}


@dataclass
class _Frame:
    tiles: set
    agents: dict = field(default_factory=dict)  # id -> tile of present agents


def _replay_frames(events: Sequence[TraceEvent], region: Region, ticks: Iterable[int]):
    """Yield (tick, frame) for each requested tick, in increasing order."""
    state = _Frame(set(region))
    it = iter(enumerate(events, start=1))
    pending = next(it, None)

    def apply(n: int, e: TraceEvent) -> None:
        try:
            if e.event == "activate":
                state.agents[e.agent] = e.tile
            elif e.event == "move":
                if e.agent not in state.agents:
                    raise TraceError(f"line {n}: move of agent {e.agent} before it was activated")
                state.agents[e.agent] = e.tile
            elif e.event == "clean":
                state.tiles.discard(e.tile)
            elif e.event == "spread":
                state.tiles = set(geometry.spread(Region(state.tiles)))
            elif e.event == "done" and e.agent is not None:
                state.agents.pop(e.agent, None)
        except (TypeError, KeyError) as exc:
            raise TraceError(f"line {n}: malformed {e.event} event ({exc})") from None
        if len(state.tiles) != e.area:
            raise TraceError(f"line {n}: area {e.area} disagrees with replay ({len(state.tiles)})")

    for tick in ticks:
        while pending is not None:
            n, e = pending
            # spreads are stamped with the tick whose region they produce
            if e.tick < tick or (e.tick == tick and e.event == "spread"):
                apply(n, e)
                pending = next(it, None)
            else:
                break
        yield tick, state


def frame_ticks(T: int, stride: int) -> list[int]:
    """Ticks rendered for a run of ``T`` ticks: every ``stride``-th, plus ``T``."""
    ticks = list(range(0, T, stride))
    ticks.append(T)
    return ticks


def render_trace(
    trace_text: str,
    region: Region,
    out_dir: Path,
    stride: int = 1,
    scale: int = 8,
) -> list[Path]:
    """Write one PNG per rendered tick; returns the paths in order."""
    from PIL import Image, ImageDraw

    from .engine import load_trace

    if stride < 1 or scale < 1:
        raise ValueError("stride and scale must be >= 1")
    events = load_trace(trace_text)
    if not events:
        raise TraceError("line 1: empty trace")
    last = events[-1]
    T = last.tick
    pivot = min(region.boundary) if region else None
    for e in events:
        if e.event == "activate":
            pivot = e.tile
            break

    # first pass: bounding box of everything that is ever contaminated
    xs, ys = [], []
    for _, fr in _replay_frames(events, region, range(T + 1)):
        for x, y in fr.tiles:
            xs.append(x)
            ys.append(y)
    if pivot is not None:
        xs.append(pivot[0])
        ys.append(pivot[1])
    if not xs:
        xs, ys = [0], [0]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    W, H = (x1 - x0 + 1) * scale, (y1 - y0 + 1) * scale

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for tick, fr in _replay_frames(events, region, frame_ticks(T, stride)):
        img = Image.new("RGB", (W, H), COLORS["clean"])
        draw = ImageDraw.Draw(img)

        def cell(t):
            px, py = (t[0] - x0) * scale, (y1 - t[1]) * scale
            return px, py, px + scale - 1, py + scale - 1

        for t in sorted(fr.tiles):
            crit = geometry._is_critical(t, fr.tiles)
            draw.rectangle(cell(t), fill=COLORS["critical" if crit else "contaminated"])
        if pivot is not None:
            draw.rectangle(cell(pivot), outline=COLORS["pivot"])
        for aid in sorted(fr.agents):
            px, py, qx, qy = cell(fr.agents[aid])
            m = max(1, scale // 4)
            draw.ellipse((px + m, py + m, qx - m, qy - m), fill=COLORS["agent"])
        path = out_dir / f"frame_{tick:06d}.png"
        img.save(path, format="PNG", optimize=False)
        paths.append(path)
    return paths
