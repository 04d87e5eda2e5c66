"""
Racing a spreading contamination
================================

Every ``d`` ticks the contaminated region grows by one tile in each
direction and its holes fill in.  Whether the agents win depends on how
many there are and how often the region spreads.
"""

import math

from antsweep import SimConfig, generate_region, run

square = generate_region(0, 100, "square")

# slow spreading: ten agents clean the square before it gets going
for d in (500, 72, 20):
    res = run(SimConfig(square, 10, d=d, trace=False))
    rep = res.bound_report
    print(f"d={d}: {res.outcome}, spreads {rep.spread_events}, {rep.feasibility.label()}")

# too few agents for a spread every tick: the area only ever grows
res = run(SimConfig(square, 9, d=1, horizon=30, trace=False))
areas = [s for _, s in res.area_series]
print("k=9, d=1 areas:", areas[:6], "...", areas[-1])
assert all(b > a for a, b in zip(areas, areas[1:]))

# the area recursion gives a floor under every spread
rep = res.bound_report
print(f"area floor checked {rep.area_checks} times, violated {rep.area_violations} times")
print(f"sqrt(S0)/d = {math.sqrt(square.area):.0f} agents needed at d=1")
