"""Tests for the per-agent decision functions."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from antsweep.geometry import DIRS4, Region, Tile
from antsweep.protocol import (
    DOWN,
    LEFT,
    RIGHT,
    UP,
    AgentState,
    ProtocolError,
    SensorRangeError,
    SensorView,
    check_completion,
    check_near_completion,
    compute_resting,
    compute_waiting,
    ignore_resting,
    priority,
    rightmost_neighbor,
    should_clean,
)


def square(n: int) -> set:
    return {(x, y) for x in range(n) for y in range(n)}


def agent(i, pos, dest=None, **kw) -> AgentState:
    a = AgentState(i, Tile(*pos), dest=None if dest is None else Tile(*dest), inserted=True, **kw)
    a.active_this_tick = True
    return a


def world(agents):
    occ: dict = {}
    for a in agents:
        occ.setdefault(a.pos, []).append(a)
    return occ


def view_of(a, tiles, agents=()):
    return SensorView(a.pos, set(tiles), world([a, *agents]))


class TestPriority:
    def test_documented_values(self) -> None:
        assert priority((0, 0), (1, 0)) == 2
        assert priority((0, 0), (0, 1)) == 1
        assert priority((0, 0), (0, -1)) == -1
        assert priority((0, 0), (-1, 0)) == -2

    @given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from(DIRS4))
    def test_unit_moves_have_distinct_nonzero_priority(self, x, y, d) -> None:
        p = priority((x, y), (x + d[0], y + d[1]))
        assert p in (-2, -1, 1, 2)


class TestRightmost:
    def test_domino_returns_to_where_it_came_from(self) -> None:
        tiles = {(0, 0), (1, 0)}
        v = SensorView((1, 0), tiles, {})
        assert rightmost_neighbor(Tile(1, 0), Tile(0, 0), v) == (0, 0)

    def test_square_edge_walk_turns_clockwise(self) -> None:
        v = SensorView((0, 1), square(3), {})
        assert rightmost_neighbor(Tile(0, 1), Tile(0, 0), v) == (0, 2)

    def test_top_edge_continues_east(self) -> None:
        v = SensorView((1, 2), square(3), {})
        assert rightmost_neighbor(Tile(1, 2), Tile(0, 2), v) == (2, 2)

    def test_isolated_tile_has_no_move(self) -> None:
        v = SensorView((0, 0), {(0, 0)}, {})
        with pytest.raises(ProtocolError):
            rightmost_neighbor(Tile(0, 0), Tile(-1, 0), v)

    def test_prev_must_be_adjacent(self) -> None:
        v = SensorView((0, 0), square(3), {})
        with pytest.raises(ProtocolError):
            rightmost_neighbor(Tile(0, 0), Tile(2, 2), v)

    def test_prev_buried_by_growth_takes_second_boundary_tile(self) -> None:
        # agent on (2,1) of a 5x5 bottom edge came from (2,2), which is interior
        tiles = square(5) - {(2, 0)}
        v = SensorView((2, 1), tiles, {})
        # clockwise after north the boundary tiles met are east then west
        assert not v.is_boundary((2, 2))
        assert rightmost_neighbor(Tile(2, 1), Tile(2, 2), v) == (1, 1)


class TestSensorView:
    def test_query_beyond_radius_raises(self) -> None:
        v = SensorView((0, 0), square(9), {})
        v.contaminated((3, 0))
        with pytest.raises(SensorRangeError):
            v.contaminated((2, 2))

    def test_ring_queries_count_their_reach(self) -> None:
        v = SensorView((0, 0), square(9), {})
        v.is_boundary((1, 0))
        assert v.max_distance <= 3
        with pytest.raises(SensorRangeError):
            v.is_boundary((1, 2))

    def test_region_objects_are_accepted(self) -> None:
        r = Region(square(3))
        v = SensorView((1, 1), r, {})
        assert v.contaminated((2, 2)) and not v.is_boundary((1, 1))


class TestResting:
    def test_earlier_arrival_has_precedence(self) -> None:
        a = agent(0, (0, 0), (1, 0), entry_tick=3)
        b = agent(1, (0, 0), (1, 0), entry_tick=1)
        tiles = square(3)
        assert compute_resting(a, view_of(a, tiles, [b]))
        assert not compute_resting(b, view_of(b, tiles, [a]))

    def test_higher_entry_priority_breaks_tick_ties(self) -> None:
        a = agent(0, (0, 0), (1, 0), entry_tick=2, entry_priority=-1)
        b = agent(1, (0, 0), (1, 0), entry_tick=2, entry_priority=2)
        assert compute_resting(a, view_of(a, square(3), [b]))

    def test_lower_id_breaks_remaining_ties(self) -> None:
        a = agent(0, (0, 0), (1, 0))
        b = agent(1, (0, 0), (1, 0))
        assert not compute_resting(a, view_of(a, square(3), [b]))
        assert compute_resting(b, view_of(b, square(3), [a]))

    def test_different_destinations_do_not_rest(self) -> None:
        a = agent(0, (0, 0), (1, 0))
        b = agent(1, (0, 0), (0, 1))
        assert not compute_resting(b, view_of(b, square(3), [a]))


class TestWaiting:
    def test_waits_on_active_left_and_down_neighbours(self) -> None:
        a = agent(0, (1, 1), (1, 2))
        left = agent(1, (0, 1), (0, 2))
        down = agent(2, (1, 0), (2, 0))
        waiting, _ = compute_waiting(a, view_of(a, square(3), [left, down]))
        assert {LEFT, DOWN} <= waiting

    def test_resting_neighbours_are_ignored(self) -> None:
        a = agent(0, (1, 1), (1, 2))
        left = agent(1, (0, 1), (0, 2), resting=True)
        waiting, _ = compute_waiting(a, view_of(a, square(3), [left]))
        assert LEFT not in waiting

    def test_right_swap_waits_and_releases_the_left_wait(self) -> None:
        a = agent(0, (0, 0), (1, 0))
        b = agent(1, (1, 0), (2, 0))
        tiles = {(0, 0), (1, 0), (2, 0)}
        waiting, released = compute_waiting(a, view_of(a, tiles, [b]))
        assert RIGHT in waiting
        assert released == [(b, LEFT)]

    def test_head_on_pair_does_not_swap(self) -> None:
        a = agent(0, (0, 0), (1, 0))
        b = agent(1, (1, 0), (0, 0))
        waiting, released = compute_waiting(a, view_of(a, {(0, 0), (1, 0)}, [b]))
        assert RIGHT not in waiting and not released

    def test_up_swap_releases_the_down_wait(self) -> None:
        a = agent(0, (0, 0), (0, 1))
        b = agent(1, (0, 1), (0, 2))
        tiles = {(0, 0), (0, 1), (0, 2)}
        waiting, released = compute_waiting(a, view_of(a, tiles, [b]))
        assert UP in waiting and released == [(b, DOWN)]

    def test_released_tags_are_dropped(self) -> None:
        a = agent(0, (1, 0), (2, 0))
        a.released.add(LEFT)
        left = agent(1, (0, 0), (1, 0))
        waiting, _ = compute_waiting(a, view_of(a, {(0, 0), (1, 0), (2, 0)}, [left]))
        assert LEFT not in waiting


class TestCleaning:
    def test_corner_of_square_is_cleaned(self) -> None:
        a = agent(0, (2, 2), (2, 1))
        assert should_clean(a, view_of(a, square(3)), Tile(0, 0))

    def test_pivot_is_never_cleaned(self) -> None:
        a = agent(0, (0, 0), (1, 0))
        assert not should_clean(a, view_of(a, square(3)), Tile(0, 0))

    def test_critical_tile_is_kept(self) -> None:
        a = agent(0, (1, 0), (2, 0))
        assert not should_clean(a, view_of(a, {(0, 0), (1, 0), (2, 0)}), Tile(0, 0))

    def test_shared_tile_is_kept(self) -> None:
        a = agent(0, (2, 2), (2, 1))
        b = agent(1, (2, 2), (1, 2))
        assert not should_clean(a, view_of(a, square(3), [b]), Tile(0, 0))

    def test_interior_tile_is_kept(self) -> None:
        a = agent(0, (1, 1), (1, 2))
        assert not should_clean(a, view_of(a, square(3)), Tile(0, 0))


class TestCompletion:
    def test_alone_on_pivot(self) -> None:
        a = agent(0, (0, 0))
        assert check_completion(a, view_of(a, {(0, 0)}), Tile(0, 0))

    def test_pivot_with_neighbour_continues(self) -> None:
        a = agent(0, (0, 0))
        assert not check_completion(a, view_of(a, {(0, 0), (1, 0)}), Tile(0, 0))

    def test_off_pivot_never_completes(self) -> None:
        a = agent(0, (1, 0))
        assert not check_completion(a, view_of(a, {(1, 0)}), Tile(0, 0))


class TestNearCompletion:
    def test_domino_with_both_agents_flagged_stops(self) -> None:
        tiles = {(0, 0), (1, 0)}
        a = agent(0, (0, 0), (1, 0))
        b = agent(1, (1, 0), (0, 0))
        check_near_completion(b, view_of(b, tiles, [a]), Tile(0, 0))
        assert b.near_completion
        assert check_near_completion(a, view_of(a, tiles, [b]), Tile(0, 0))

    def test_unoccupied_neighbour_clears_the_flag(self) -> None:
        a = agent(0, (0, 0), (1, 0))
        assert not check_near_completion(a, view_of(a, {(0, 0), (1, 0)}), Tile(0, 0))
        assert not a.near_completion

    def test_saturation_needs_two_agents_per_tile(self) -> None:
        tiles = {(0, 0), (1, 0), (2, 0)}
        crowd = [agent(i, p, (0, 0)) for i, p in enumerate([(1, 0), (1, 0), (2, 0), (2, 0)])]
        a = crowd[2]
        check_near_completion(a, SensorView(a.pos, tiles, world(crowd)), Tile(0, 0))
        assert a.saturated_perimeter
        for c in crowd:
            c.saturated_perimeter = True
        assert ignore_resting(a, SensorView(a.pos, tiles, world(crowd)))

    def test_single_agent_is_not_saturated(self) -> None:
        a = agent(0, (2, 0), (1, 0))
        check_near_completion(a, view_of(a, {(0, 0), (1, 0), (2, 0)}), Tile(0, 0))
        assert not a.saturated_perimeter


class TestAgentState:
    def test_memory_is_bounded_to_declared_fields(self) -> None:
        a = AgentState(0, Tile(0, 0))
        assert set(vars(a)) == {
            "id", "pos", "prev", "dest", "entry_tick", "entry_priority", "resting",
            "waiting", "near_completion", "saturated_perimeter", "active_this_tick",
            "inserted", "stopped", "released",
        }

    def test_present_requires_insertion(self) -> None:
        a = AgentState(0, Tile(0, 0))
        assert not a.present
        a.inserted = True
        assert a.present
        a.stopped = True
        assert not a.present
