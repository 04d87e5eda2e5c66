"""
Exploring the cover-time bounds
===============================

The static bound needs only the boundary size and depth of the region.
The dynamic bound solves a quadratic in the number of spread periods,
and has no positive root when the region spreads too quickly.
"""

from antsweep.bounds import BoundInputs, dynamic_bound, feasibility, gamma_params
from antsweep.experiments import generate_region
from antsweep.geometry import region_radius

square = generate_region(0, 100, "square")
R = square.bounding_rect_perimeter
print(f"10x10: c0={square.perimeter_length}, boundary={len(square.boundary)}, W={square.depth}")

# scan the spread period and report where the dynamic bound starts to exist
for d in (72, 200, 391, 392, 500, 1000):
    inputs = BoundInputs.from_region(square, 10, d)
    b = dynamic_bound(inputs)
    value = f"{b.value:.1f}" if b.applicable else f"none ({b.reason})"
    print(f"d={d:4}: discriminant {b.discriminant:10.3f}, bound {value}, "
          f"{feasibility(inputs, R).label()}")

# the gamma parameters behind the bound
p = gamma_params(BoundInputs.from_region(square, 10, 500))
print({name: round(getattr(p, name), 4) for name in ("gamma2", "gamma1", "A1", "A2", "A3", "A4")})

# a straight line maximises the perimeter walk, pushing gamma2 just past c0
line = generate_region(0, 20, "line")
p = gamma_params(BoundInputs.from_region(line, 1, 50))
print(f"line of 20: c0={line.perimeter_length}, gamma2={p.gamma2:.4f}")
print(f"radius of the square: {region_radius(square)}")
