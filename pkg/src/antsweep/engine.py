"""Global clock for SWEEP runs: insertion, per-tick phases, spread, termination.

One tick ``t`` runs these phases in order:

1. agent ``i`` (0-based) is placed on the pivot at ``t = 2i`` and acts at once;
2. completion and near-completion checks; flags of every agent are refreshed
   from the start-of-tick picture before any stop is applied;
3. destinations are signalled and resting is decided once for the tick;
4. a bounded fixed-point over the agents in id order: each active agent
   re-reads its destination, computes its waiting set, and if it waits on
   nobody it cleans (when allowed) and moves at once;
5. if ``t + 1`` is a multiple of ``d`` the region spreads.

The region at "tick ``T``" is the state after ``T`` ticks, so a run that
empties the region during tick ``t`` is ``covered(t + 1)``.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from . import bounds, charts, geometry
from .geometry import Region, RegionError, Tile
from .protocol import (
    AgentState,
    ProtocolError,
    SensorView,
    check_completion,
    compute_resting,
    compute_waiting,
    ignore_resting,
    initial_move,
    is_active,
    near_completion_flag,
    near_completion_stop,
    neighborhood_mask,
    priority,
    rightmost_neighbor,
    saturated_flag,
    should_clean,
)

TRACE_FIELDS = ("tick", "event", "agent", "tile", "area", "detail")
EVENT_KINDS = ("activate", "move", "clean", "spread", "flag", "stall", "done")


class ConfigError(ValueError):
    pass


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    region: Region | str | Path
    k: int
    d: float = math.inf
    horizon: int | None = None
    seed: int = 0
    # "lexmin" or "seeded" (a seed-chosen charted boundary tile)
    pivot: str = "lexmin"
    trace: bool = True
    # re-verify simple connectivity and agent containment after every tick
    check_invariants: bool = False

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise ConfigError(f"k must be an integer >= 1, got {self.k!r}")
        if not (self.d == math.inf or (float(self.d).is_integer() and self.d >= 1)):
            raise ConfigError(f"d must be a positive integer or inf, got {self.d!r}")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon!r}")
        if self.pivot not in ("lexmin", "seeded"):
            raise ConfigError(f"unknown pivot policy {self.pivot!r}")

    def load_region(self) -> Region:
        src = self.region
        if isinstance(src, Region):
            region = src.copy()
        elif isinstance(src, Path):
            region = geometry.parse(src.read_text())
        else:
            region = geometry.parse(src)
        if not region:
            raise ConfigError("region is empty")
        if not geometry.is_simply_connected(region):
            raise RegionError("region is not simply connected")
        return region


def default_horizon(S0: int) -> int:
    return math.ceil(10 * S0 * S0 * max(1.0, math.log(S0)))


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    event: str
    agent: int | None
    tile: tuple[int, int] | None
    area: int
    detail: dict | None = None

    def to_line(self) -> str:
        rec = {
            "tick": self.tick,
            "event": self.event,
            "agent": self.agent,
            "tile": None if self.tile is None else [self.tile[0], self.tile[1]],
            "area": self.area,
            "detail": self.detail,
        }
        return json.dumps(rec, separators=(",", ":"), sort_keys=False)

    @classmethod
    def from_line(cls, line: str, lineno: int = 0) -> TraceEvent:
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceError(f"line {lineno}: not JSON ({e.msg})") from None
        if not isinstance(rec, dict) or tuple(rec) != TRACE_FIELDS:
            raise TraceError(f"line {lineno}: expected fields {', '.join(TRACE_FIELDS)}")
        if rec["event"] not in EVENT_KINDS:
            raise TraceError(f"line {lineno}: unknown event {rec['event']!r}")
        tile = rec["tile"]
        if tile is not None:
            if not (isinstance(tile, list) and len(tile) == 2 and all(isinstance(v, int) for v in tile)):
                raise TraceError(f"line {lineno}: bad tile {tile!r}")
            tile = Tile(*tile)
        if not isinstance(rec["tick"], int) or not isinstance(rec["area"], int):
            raise TraceError(f"line {lineno}: tick and area must be integers")
        return cls(rec["tick"], rec["event"], rec["agent"], tile, rec["area"], rec["detail"])


def dump_trace(events: Iterable[TraceEvent]) -> str:
    return "".join(e.to_line() + "\n" for e in events)


def load_trace(text: str) -> list[TraceEvent]:
    return [
        TraceEvent.from_line(line, i)
        for i, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]


@dataclass(frozen=True)
class Outcome:
    kind: str  # covered, timeout or stalled
    tick: int

    def __str__(self) -> str:
        return f"{self.kind}({self.tick})"


@dataclass(frozen=True)
class Snapshot:
    """Comparable summary of a world state, as rebuilt by :func:`replay`."""

    tick: int
    tiles: frozenset
    agents: tuple  # (inserted, pos, prev, stopped) per agent
    outcome: Outcome | None


@dataclass(frozen=True)
class BoundReport:
    inputs: bounds.BoundInputs
    R: int
    radius: int | None
    static_bound: float
    dynamic: bounds.DynamicBound | None
    feasibility: bounds.Feasibility
    cover_time: int | None
    spread_events: int
    # None when the bound does not apply to the run
    static_satisfied: bool | None
    dynamic_satisfied: bool | None
    area_checks: int
    area_violations: int

    def to_dict(self) -> dict:
        dyn = self.dynamic
        return {
            "S0": self.inputs.S0,
            "c0": self.inputs.c0,
            "boundary_card": self.inputs.boundary_card,
            "W": self.inputs.W,
            "k": self.inputs.k,
            "d": None if math.isinf(self.inputs.d) else int(self.inputs.d),
            "R": self.R,
            "radius": self.radius,
            "classification": self.feasibility.label(),
            "static_bound": self.static_bound,
            "dynamic_bound": None if dyn is None else dyn.value,
            "dynamic_discriminant": None if dyn is None else dyn.discriminant,
            "dynamic_roots": None if dyn is None else list(dyn.roots),
            "cover_time": self.cover_time,
            "static_satisfied": self.static_satisfied,
            "dynamic_satisfied": self.dynamic_satisfied,
            "area_checks": self.area_checks,
            "area_violations": self.area_violations,
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass(frozen=True)
class SimResult:
    outcome: Outcome
    trace: tuple[TraceEvent, ...]
    area_series: tuple[tuple[int, int], ...]
    bound_report: BoundReport
    cleaned: int
    violations: tuple[str, ...]
    max_sensor_distance: int
    held_ticks: int  # agent-ticks left undecided by the fixed-point cap
    final: Snapshot


def bound_inputs(region: Region, k: int, d: float) -> bounds.BoundInputs:
    return bounds.BoundInputs.from_region(region, k, d)


def evaluate_bounds(region: Region, k: int, d: float, with_radius: bool = False) -> tuple:
    """Static, dynamic and feasibility evaluation of a region without simulating."""
    inputs = bound_inputs(region, k, d)
    R = region.bounding_rect_perimeter
    dyn = None
    if not math.isinf(d):
        try:
            dyn = bounds.dynamic_bound(inputs)
        except bounds.BoundError as e:
            dyn = bounds.DynamicBound(None, None, (), None, str(e))
    radius = geometry.region_radius(region) if with_radius else None
    return inputs, R, radius, bounds.static_bound(inputs), dyn, bounds.feasibility(inputs, R)


def area_bound_check(series, d: float, k: int) -> tuple[int, int]:
    """(checks, violations) of the area recursion over consecutive spread samples."""
    checks = violations = 0
    for (t0, s0), (t1, s1) in zip(series, series[1:]):
        if t1 - t0 != d:
            continue
        try:
            low = bounds.area_lower_bound_step(s0, int(d), k)
        except bounds.InapplicableBound:
            continue
        checks += 1
        if s1 < low:
            violations += 1
    return checks, violations


class Simulation:
    """Mutable world advanced one tick at a time by :meth:`step`."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.region = config.load_region()
        self.initial = self.region.copy()
        self.k = config.k
        self.d = config.d
        self.S0 = self.region.area
        self.horizon = config.horizon or default_horizon(self.S0)
        self.pivot = self._choose_pivot()
        self.agents = [AgentState(id=i, pos=self.pivot) for i in range(self.k)]
        self.occupancy: dict[Tile, list[AgentState]] = {}
        self.tick = 0
        self.outcome: Outcome | None = None
        self.trace: list[TraceEvent] = []
        self.area_series: list[tuple[int, int]] = [(0, self.S0)]
        self.cleaned = 0
        self.violations: list[str] = []
        self.max_sensor_distance = 0
        self.held_ticks = 0
        self._idle = 0

    # -- helpers -------------------------------------------------------------

    def _choose_pivot(self) -> Tile:
        bnd = sorted(self.region.boundary)
        if self.config.pivot == "lexmin":
            return bnd[0]
        table = charts.default_table()
        ok = [
            b for b in bnd
            if len(self.region) == 1
            or neighborhood_mask(b, SensorView(b, self.region, {})) in table
        ]
        return random.Random(self.config.seed).choice(ok)

    def _emit(self, event, agent=None, tile=None, detail=None, tick=None):
        if self.config.trace:
            self.trace.append(TraceEvent(
                self.tick if tick is None else tick,
                event,
                agent,
                None if tile is None else Tile(*tile),
                len(self.region),
                detail,
            ))

    def _view(self, agent: AgentState) -> SensorView:
        return SensorView(agent.pos, self.region, self.occupancy)

    def _done_with(self, view: SensorView) -> None:
        if view.max_distance > self.max_sensor_distance:
            self.max_sensor_distance = view.max_distance

    def _place(self, agent: AgentState, tile: Tile) -> None:
        self.occupancy.setdefault(tile, []).append(agent)

    def _remove(self, agent: AgentState) -> None:
        lst = self.occupancy[agent.pos]
        lst.remove(agent)
        if not lst:
            del self.occupancy[agent.pos]

    def _clean(self, tile: Tile, agent: int | None) -> None:
        if tile in self.region:
            self.region.discard(tile)
            self.cleaned += 1
            self._emit("clean", agent, tile)

    def _destination(self, agent: AgentState) -> Tile | None:
        view = self._view(agent)
        try:
            if agent.prev is None:
                try:
                    return initial_move(agent.pos, view)
                except charts.ChartError:
                    if self.tick == 0:
                        raise
                    # a later entrant meets an uncharted pattern: walk as if
                    # entering from the west
                    west = Tile(agent.pos[0] - 1, agent.pos[1])
                    return rightmost_neighbor(agent.pos, west, view)
            return rightmost_neighbor(agent.pos, agent.prev, view)
        except ProtocolError:
            return None
        finally:
            self._done_with(view)

    # -- phases --------------------------------------------------------------

    def _activate(self) -> bool:
        fired = False
        for a in self.agents:
            if not a.inserted and self.tick >= 2 * a.id:
                a.inserted = True
                a.pos = self.pivot
                a.entry_tick = self.tick
                self._place(a, a.pos)
                self._emit("activate", a.id, a.pos)
                fired = True
        return fired

    def _checks(self) -> None:
        present = [a for a in self.agents if a.present]
        views = {a.id: self._view(a) for a in present}
        stops = [a for a in present if check_completion(a, views[a.id], self.pivot)]
        for a in present:
            v = views[a.id]
            nc = near_completion_flag(a, v)
            sp = saturated_flag(a, v, self.pivot)
            for name, val in (("near_completion", nc), ("saturated_perimeter", sp)):
                if getattr(a, name) != val:
                    setattr(a, name, val)
                    self._emit("flag", a.id, a.pos, {name: val})
        candidates = [
            a for a in present
            if a not in stops and near_completion_stop(a, views[a.id])
        ]
        for v in views.values():
            self._done_with(v)
        for a in stops:
            self._clean(a.pos, a.id)
        for a in stops:
            self._stop(a)
        # Near-completion stops are decided on the start-of-tick picture but
        # applied one tile at a time on the live region, and only where the
        # cleaning can neither split the region nor open a hole.  Everyone
        # on a cleaned tile stops with it.
        for a in candidates:
            if a.stopped:
                continue
            v = self._view(a)
            pos = a.pos
            last = len(self.region) == 1 and pos in self.region
            unsafe = pos in self.region and not last and (
                pos == self.pivot or not v.is_boundary(pos) or v.is_critical(pos)
            )
            self._done_with(v)
            if unsafe:
                continue
            self._clean(pos, a.id)
            for b in sorted(self.occupancy.get(pos, ()), key=lambda b: b.id):
                self._stop(b)

    def _stop(self, a: AgentState) -> None:
        self._remove(a)
        a.stopped = True
        self._emit("done", a.id, a.pos)

    def _move_phase(self) -> bool:
        movers = [a for a in self.agents if a.present]
        # destinations depend on the region only; within a tick it changes
        # only by cleaning, so the clean count tells when to recompute
        version: dict[int, int] = {}
        for a in movers:
            a.released = set()
            a.waiting = set()
            a.dest = self._destination(a)
            version[a.id] = self.cleaned
            a.active_this_tick = a.dest is not None
        for a in movers:
            v = self._view(a)
            a.resting = False if ignore_resting(a, v) else compute_resting(a, v)
            self._done_with(v)

        moved = False
        for _ in range(self.k + 4):
            changed = False
            for a in movers:
                if not is_active(a):
                    continue
                if version[a.id] == self.cleaned:
                    dest = a.dest
                else:
                    dest = self._destination(a)
                    version[a.id] = self.cleaned
                if dest is None:
                    a.dest = None
                    a.active_this_tick = False
                    continue
                a.dest = dest
                v = self._view(a)
                waiting, released = compute_waiting(a, v)
                for j, tag in released:
                    if tag not in j.released:
                        j.released.add(tag)
                        changed = True
                a.waiting = waiting
                if waiting:
                    self._done_with(v)
                    continue
                src = a.pos
                if should_clean(a, v, self.pivot):
                    self._clean(src, a.id)
                self._done_with(v)
                self._remove(a)
                a.prev, a.pos = src, dest
                a.entry_tick = self.tick
                a.entry_priority = priority(src, dest)
                a.active_this_tick = False
                self._place(a, dest)
                self._emit("move", a.id, dest, {"from": [src[0], src[1]]})
                changed = moved = True
            if not changed:
                break
        for a in movers:
            if is_active(a):
                self.held_ticks += 1
            a.active_this_tick = False
        return moved

    def _check_invariants(self) -> None:
        t = self.tick
        if not self.region:
            return
        if not geometry.is_simply_connected(self.region):
            self.violations.append(f"tick {t}: region not simply connected")
        for a in self.agents:
            if a.present and a.pos not in self.region:
                self.violations.append(f"tick {t}: agent {a.id} off the region at {tuple(a.pos)}")

    def step(self) -> Outcome | None:
        """Advance one tick; returns the outcome once the run is decided."""
        if self.outcome is not None:
            raise RuntimeError("simulation already finished")
        before = self.cleaned
        progress = self._activate()
        self._checks()
        if self.region:
            progress |= self._move_phase()
        progress |= self.cleaned != before
        self.tick += 1
        if self.region and not math.isinf(self.d) and self.tick % int(self.d) == 0:
            self.region = geometry.spread(self.region)
            self.area_series.append((self.tick, len(self.region)))
            self._emit("spread", detail=None)
            progress = True
        if self.config.check_invariants:
            self._check_invariants()

        self._idle = 0 if progress else self._idle + 1
        if not self.region:
            self._finish("covered")
        elif self._idle >= self.k + 4 or not any(
            a.present or not a.inserted for a in self.agents
        ):
            self._emit("stall", detail={"idle_ticks": self._idle})
            self._finish("stalled")
        elif self.tick >= self.horizon:
            self._finish("timeout")
        return self.outcome

    def _finish(self, kind: str) -> None:
        self.outcome = Outcome(kind, self.tick)
        self._emit("done", detail={"outcome": kind})

    def snapshot(self) -> Snapshot:
        return Snapshot(
            self.tick,
            self.region.tiles,
            tuple((a.inserted, a.pos if a.inserted else None, a.prev, a.stopped) for a in self.agents),
            self.outcome,
        )

    def run(self) -> SimResult:
        while self.outcome is None:
            self.step()
        return self.result()

    def result(self) -> SimResult:
        return SimResult(
            outcome=self.outcome,
            trace=tuple(self.trace),
            area_series=tuple(self.area_series),
            bound_report=self._bound_report(),
            cleaned=self.cleaned,
            violations=tuple(self.violations),
            max_sensor_distance=self.max_sensor_distance,
            held_ticks=self.held_ticks,
            final=self.snapshot(),
        )

    def _bound_report(self) -> BoundReport:
        inputs, R, radius, t_static, dyn, feas = evaluate_bounds(self.initial, self.k, self.d)
        covered = self.outcome is not None and self.outcome.kind == "covered"
        T = self.outcome.tick if covered else None
        spreads = len(self.area_series) - 1
        static_ok = dyn_ok = None
        if spreads == 0 and self.outcome is not None:
            static_ok = covered and T <= t_static + bounds.TICK_SLACK
        if dyn is not None and dyn.applicable and self.outcome is not None:
            dyn_ok = covered and T <= dyn.value + bounds.TICK_SLACK
        checks, viol = (0, 0)
        if not math.isinf(self.d):
            checks, viol = area_bound_check(self.area_series, self.d, self.k)
        return BoundReport(
            inputs, R, radius, t_static, dyn, feas, T, spreads,
            static_ok, dyn_ok, checks, viol,
        )


def init(config: SimConfig) -> Simulation:
    return Simulation(config)


def run(config: SimConfig) -> SimResult:
    return Simulation(config).run()


def replay(events: Iterable[TraceEvent], region: Region, k: int) -> Snapshot:
    """Rebuild the final world state from a trace with a pure reducer."""
    tiles = set(region)
    agents = [[False, None, None, False] for _ in range(k)]
    tick = 0
    outcome = None
    for n, e in enumerate(events, start=1):
        tick = e.tick
        if e.event == "activate":
            agents[e.agent][0:2] = [True, e.tile]
        elif e.event == "move":
            agents[e.agent][1:3] = [e.tile, Tile(*e.detail["from"])]
        elif e.event == "clean":
            tiles.discard(e.tile)
        elif e.event == "spread":
            tiles = set(geometry.spread(Region(tiles)))
        elif e.event == "done":
            if e.agent is not None:
                agents[e.agent][3] = True
            else:
                outcome = Outcome(e.detail["outcome"], e.tick)
        if len(tiles) != e.area:
            raise TraceError(f"event {n}: area {e.area} but replay has {len(tiles)}")
    return Snapshot(
        tick,
        frozenset(Tile(*t) for t in tiles),
        tuple(tuple(a) for a in agents),
        outcome,
    )
