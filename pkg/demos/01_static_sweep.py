"""
Sweeping a static region
========================

A handful of agents enter a random blob one at a time from its pivot tile,
walk its boundary clockwise and peel it away tile by tile.
"""

from antsweep import SimConfig, generate_region, run
from antsweep.bounds import BoundInputs, static_bound
from antsweep.geometry import serialize

# a seeded random blob of 120 tiles, drawn as text
region = generate_region(seed=7, target_area=120, shape="random-tree-grown")
print(serialize(region))
print(f"area {region.area}, boundary {len(region.boundary)}, depth {region.depth}")

# more agents finish sooner, and every run stays under the static bound
for k in (1, 2, 4, 8):
    res = run(SimConfig(region, k, check_invariants=True))
    bound = static_bound(BoundInputs.from_region(region, k))
    print(f"k={k}: {res.outcome}, bound {bound:.0f}, invariant violations {len(res.violations)}")

# the trace records every activation, move and cleaned tile
res = run(SimConfig(region, 3))
kinds = {}
for e in res.trace:
    kinds[e.event] = kinds.get(e.event, 0) + 1
print("trace events:", kinds)
