"""Closed-form cover-time bounds and feasibility thresholds for SWEEP.

All arithmetic is double precision.  Comparisons against integer tick
counts use :data:`TICK_SLACK` to absorb rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .geometry import Region

TICK_SLACK = 1
EULER_GAMMA = 0.57721566490153286061

# Bernoulli-number coefficients B_2n / (2n) of the asymptotic series.
_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_SHIFT = 10.0


class BoundError(ValueError):
    """A bound's precondition does not hold for the given inputs."""


class InapplicableBound(BoundError):
    """The bound exists as a formula but says nothing for these inputs."""


def digamma(x: float) -> float:
    """Logarithmic derivative of the Gamma function for ``x > 0``.

    Shifts the argument up to at least 10 with the recurrence
    psi(x) = psi(x+1) - 1/x and then sums the asymptotic expansion.
    """
    if not x > 0 or math.isinf(x):
        raise ValueError(f"digamma needs a finite positive argument, got {x!r}")
    acc = 0.0
    while x < _SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series, p = 0.0, inv2
    for c in _ASYMPTOTIC:
        series += c * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


@dataclass(frozen=True)
class BoundInputs:
    S0: int
    c0: int
    boundary_card: int
    W: int
    k: int
    d: float = math.inf

    def __post_init__(self):
        if self.S0 < 1 or self.boundary_card < 1 or self.c0 < 1:
            raise BoundError(f"geometry inputs must be >= 1: {self}")
        if self.k < 1:
            raise BoundError(f"k must be >= 1, got {self.k}")
        if not self.d >= 1:
            raise BoundError(f"d must be >= 1 or infinite, got {self.d}")
        if self.W < 0:
            raise BoundError(f"depth must be >= 0, got {self.W}")

    @classmethod
    def from_region(cls, region: Region, k: int, d: float = math.inf) -> BoundInputs:
        return cls(
            S0=region.area,
            c0=region.perimeter_length,
            boundary_card=len(region.boundary),
            W=region.depth,
            k=k,
            d=d,
        )


@dataclass(frozen=True)
class GammaParams:
    gamma2: float
    gamma1: float
    gamma: float
    A1: float
    A2: float
    A3: float
    A4: float


@dataclass(frozen=True)
class DynamicBound:
    """Result of the dynamic cover-time formula.

    ``value`` is ``None`` when the formula is inapplicable; ``reason`` then
    says why.  Roots are in units of spread periods, ``value`` in ticks.
    """

    value: float | None
    discriminant: float | None
    roots: tuple[float, ...] = ()
    params: GammaParams | None = None
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.value is not None


def static_bound(inputs: BoundInputs) -> float:
    """Cover time of a static region by ``k`` agents."""
    k = inputs.k
    return 8.0 * (inputs.boundary_card - 1) * (inputs.W + k) / k + 2.0 * k


def area_lower_bound_step(S_t: int, d: int, k: int) -> int:
    """Least possible area one spread period after area ``S_t``.

    Raises :class:`InapplicableBound` when ``d*k`` agent-steps could clean
    the whole region first.
    """
    rest = S_t - d * k
    if rest < 1:
        raise InapplicableBound(
            f"S - d*k = {rest} < 1: the agents can outpace the spread"
        )
    # floor(2*sqrt(r)) == isqrt(4r) exactly, with no float rounding
    return rest + math.isqrt(4 * (2 * rest - 1))


def gamma_params(inputs: BoundInputs) -> GammaParams:
    S0, c0, bc, W, k, d = (
        inputs.S0, inputs.c0, inputs.boundary_card, inputs.W, inputs.k, inputs.d,
    )
    if bc < 2:
        raise BoundError("degenerate region: fewer than 2 boundary tiles")
    if math.isinf(d):
        raise InapplicableBound("no spread (d is infinite): use the static bound")
    rad = (c0 + 2) ** 2 - 8 * S0 + 8
    if rad <= 0:
        raise BoundError(f"gamma2 imaginary: (c0+2)^2 - 8*S0 + 8 = {rad}")
    g2 = math.sqrt(rad)
    A1 = (c0 + 2 - g2) / 4.0
    A2 = (c0 + 2 + g2) / 4.0
    A3 = 8.0 * g2 / (d * k)
    g = 8.0 * (k + W) / k - (d - 2.0 * k) / (bc - 1)
    g1 = digamma(1.0 + A2) - digamma(1.0 + A1)
    A4 = g1 - g2 * g / d
    return GammaParams(gamma2=g2, gamma1=g1, gamma=g, A1=A1, A2=A2, A3=A3, A4=A4)


def dynamic_bound(inputs: BoundInputs) -> DynamicBound:
    """Cover-time bound for a region spreading every ``d`` ticks.

    ``d`` times the smallest positive root of the quadratic in the number
    of elapsed spread periods; inapplicable if there is none.
    """
    p = gamma_params(inputs)
    A1, A2, A3, A4 = p.A1, p.A2, p.A3, p.A4
    disc = (A1 * A3 - A4) ** 2 - 4.0 * A3 * (A2 - A1 - A1 * A4)
    if disc < 0:
        return DynamicBound(None, disc, (), p, "negative discriminant")
    sq = math.sqrt(disc)
    roots = ((A4 - A1 * A3 - sq) / (2 * A3), (A4 - A1 * A3 + sq) / (2 * A3))
    positive = [r for r in roots if r > 0]
    if not positive:
        return DynamicBound(None, disc, roots, p, "no positive root")
    return DynamicBound(inputs.d * min(positive), disc, roots, p)


def quarter_sphere_count(L: int) -> int:
    """Tiles of one quadrant (axes included) of a digital sphere of radius ``L``."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    return (L * L + 3 * L) // 2 + 1


class Classification(str, enum.Enum):
    IMPOSSIBLE_AREA = "IMPOSSIBLE_AREA"
    LIKELY_IMPOSSIBLE_DISTANCE = "LIKELY_IMPOSSIBLE_DISTANCE"
    SWEEP_GUARANTEED = "SWEEP_GUARANTEED"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Feasibility:
    classification: Classification
    # the d^2*k < R test fired; an asymptotic statement, so only a heuristic
    distance_heuristic: bool
    notes: tuple[str, ...] = field(default=())

    def label(self) -> str:
        s = self.classification.value
        if self.distance_heuristic and self.classification is not (
            Classification.LIKELY_IMPOSSIBLE_DISTANCE
        ):
            s += "+LIKELY_IMPOSSIBLE_DISTANCE"
        return s


def feasibility(inputs: BoundInputs, R: int) -> Feasibility:
    """Classify whether ``k`` agents can clean a region spreading every ``d`` ticks.

    Checked in order, first match wins: the exact area threshold (regions
    of at least 3 tiles), the distance heuristic ``d^2 k < R`` with unit
    constant, then a guarantee from the dynamic bound or from the static
    bound finishing before the first spread.
    """
    S0, k, d = inputs.S0, inputs.k, inputs.d
    notes = []
    distance = (not math.isinf(d)) and d * d * k < R
    if distance:
        notes.append(f"heuristic: d^2*k = {d * d * k:g} < R = {R}")
    if S0 >= 3 and k < math.sqrt(S0) / d:
        notes.append(f"k = {k} < sqrt(S0)/d = {math.sqrt(S0) / d:.6g}")
        return Feasibility(Classification.IMPOSSIBLE_AREA, distance, tuple(notes))
    if distance:
        return Feasibility(Classification.LIKELY_IMPOSSIBLE_DISTANCE, True, tuple(notes))
    t_static = static_bound(inputs)
    if math.isinf(d) or t_static + TICK_SLACK < d:
        notes.append(f"static bound {t_static:.6g} finishes before any spread")
        return Feasibility(Classification.SWEEP_GUARANTEED, False, tuple(notes))
    try:
        dyn = dynamic_bound(inputs)
    except BoundError as e:
        notes.append(f"dynamic bound: {e}")
        return Feasibility(Classification.UNKNOWN, False, tuple(notes))
    if dyn.applicable:
        notes.append(f"dynamic bound {dyn.value:.6g}")
        return Feasibility(Classification.SWEEP_GUARANTEED, False, tuple(notes))
    notes.append(f"dynamic bound inapplicable: {dyn.reason}")
    return Feasibility(Classification.UNKNOWN, False, tuple(notes))
