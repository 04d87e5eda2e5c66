"""Simulator and analytic bounds for the SWEEP multi-agent grid-cleaning protocol."""

from .bounds import (
    BoundInputs,
    Classification,
    digamma,
    dynamic_bound,
    feasibility,
    gamma_params,
    quarter_sphere_count,
    static_bound,
    area_lower_bound_step,
)
from .engine import SimConfig, SimResult, Simulation, replay, run
from .experiments import generate_region
from .geometry import Region, Tile, parse, serialize, spread

__all__ = [
    "BoundInputs", "Classification", "Region", "SimConfig", "SimResult", "Simulation",
    "Tile", "area_lower_bound_step", "digamma", "dynamic_bound", "feasibility",
    "gamma_params", "generate_region", "parse", "quarter_sphere_count", "replay", "run",
    "serialize", "spread", "static_bound",
]
