"""Acceptance criteria, one test each, at their stated tolerances.

Each test records a ``criterion N: PASS/FAIL - ...`` line that is printed
and repeated in the terminal summary.
"""

import math
import random

import numpy as np

from antsweep.bounds import (
    TICK_SLACK,
    BoundError,
    BoundInputs,
    InapplicableBound,
    area_lower_bound_step,
    digamma,
    dynamic_bound,
    gamma_params,
    static_bound,
)
from antsweep.engine import SimConfig, dump_trace, replay, run
from antsweep.experiments import SHAPES, generate_region
from antsweep.geometry import Region

from conftest import DYNAMIC_RUNS


def corpus(n: int = 200, max_area: int = 400):
    """Deterministic mix of every shape class, areas spread over [1, max_area]."""
    rng = random.Random(2024)
    out = [generate_region(0, 1, "square")]
    for i in range(n - 1):
        shape = SHAPES[i % len(SHAPES)]
        out.append(generate_region(rng.randrange(2**32), rng.randint(1, max_area), shape))
    return out


class TestAcceptance:
    def test_c1_static_bound(self, criterion) -> None:
        failures, worst, runs = [], 0.0, 0
        for region in corpus():
            for k in (1, 2, 4, 8):
                res = run(SimConfig(region, k, trace=False))
                bound = static_bound(BoundInputs.from_region(region, k))
                runs += 1
                T = res.outcome.tick
                worst = max(worst, T / bound)
                if res.outcome.kind != "covered" or T > bound + TICK_SLACK:
                    failures.append((region.area, k, str(res.outcome), bound))
        ok = not failures
        criterion(1, ok, f"{runs} runs, {len(failures)} failures, worst T/bound {worst:.3f}")
        assert ok, failures[:5]

    def test_c2_three_by_three(self, criterion) -> None:
        res = run(SimConfig(generate_region(0, 9, "square"), 1))
        ok = res.outcome.kind == "covered" and res.outcome.tick <= 114 and res.cleaned == 9
        criterion(2, ok, f"{res.outcome}, cleaned {res.cleaned}, bound 114")
        assert ok

    def test_c3_area_lower_bound(self, criterion) -> None:
        rng = random.Random(7)
        for shape in SHAPES:
            for _ in range(4):
                region = generate_region(rng.randrange(2**32), rng.randint(4, 80), shape)
                k, d = rng.choice((1, 2, 3)), rng.choice((2, 3, 5, 10, 25))
                run(SimConfig(region, k, d=d, horizon=150, trace=False))
        checks = sum(r[2] for r in DYNAMIC_RUNS)
        viol = sum(r[3] for r in DYNAMIC_RUNS)
        ok = checks > 0 and viol == 0
        criterion(3, ok, f"{len(DYNAMIC_RUNS)} dynamic runs, {checks} checks, {viol} violations")
        assert ok

    def test_c4_impossibility(self, criterion) -> None:
        region = generate_region(0, 100, "square")
        k, d = 9, 1
        assert k < math.sqrt(region.area) / d
        res = run(SimConfig(region, k, d=d, horizon=150, trace=False))
        areas = [s for _, s in res.area_series]
        increasing = all(b > a for a, b in zip(areas, areas[1:]))
        recursion_growth = True
        for s in areas[:-1]:
            try:
                recursion_growth &= area_lower_bound_step(s, d, k) > s
            except InapplicableBound:
                pass
        never_zero = res.outcome.kind != "covered" and min(areas) > 0
        ok = never_zero and increasing and recursion_growth
        criterion(
            4, ok,
            f"{res.outcome}, area {areas[0]} -> {areas[-1]} over {len(areas) - 1} spreads, "
            f"strictly increasing={increasing}",
        )
        assert ok

    def test_c5_dynamic_upper_bound(self, criterion) -> None:
        region = generate_region(0, 100, "square")
        k = 10
        d = 2 * region.perimeter_length
        b = dynamic_bound(BoundInputs.from_region(region, k, d))
        res = run(SimConfig(region, k, d=d, trace=False))
        envelope = 10 * region.area**2 * math.log(region.area)
        finished = res.outcome.kind == "covered" and res.outcome.tick <= envelope
        positive = b.applicable and b.value > 0
        within = positive and res.outcome.tick <= b.value + TICK_SLACK
        ok = positive and within and finished
        criterion(
            5, ok,
            f"d={d}: dynamic_bound={b.value} (discriminant {b.discriminant:.4g}, {b.reason or 'ok'}); "
            f"run {res.outcome}, envelope {envelope:.0f}",
        )
        assert positive, f"no positive bound: discriminant {b.discriminant}"
        assert within and finished

    def test_c6_gamma_inequalities(self, criterion) -> None:
        low = high = g1_bad = n = 0
        examples = []
        for region in corpus():
            if region.area < 6:
                continue
            n += 1
            c0 = region.perimeter_length
            try:
                p = gamma_params(BoundInputs.from_region(region, 1, 10))
            except BoundError:
                low += 1
                continue
            low += not (p.gamma2 > c0 / 2)
            if not p.gamma2 < c0:
                high += 1
                if len(examples) < 3:
                    examples.append((region.area, c0, round(p.gamma2, 3)))
            g1_bad += not (p.gamma1 > 0)
        ok = low == high == g1_bad == 0
        criterion(
            6, ok,
            f"{n} regions: c0/2<g2 fails {low}, g2<c0 fails {high} (S0, c0, g2 e.g. {examples}), "
            f"g1<=0 {g1_bad}",
        )
        assert ok

    def test_c7_digamma(self, criterion) -> None:
        e1 = abs(digamma(1.0) + 0.5772156649)
        xs = np.linspace(0.05, 200.0, 40001)
        e2 = max(abs(digamma(x + 1) - digamma(x) - 1 / x) for x in xs)
        e3 = abs(digamma(5.0) - digamma(2.0) - 13 / 12)
        ok = e1 <= 1e-9 and e2 <= 1e-12 and e3 <= 1e-10
        criterion(7, ok, f"|psi(1)+gamma|={e1:.2e}, recurrence {e2:.2e}, psi(5)-psi(2) residual {e3:.2e}")
        assert ok

    def test_c8_protocol_invariants(self, criterion) -> None:
        rng = random.Random(99)
        viol, max_dist, nondet, bad_replay, runs = [], 0, 0, 0, 0
        for i in range(48):
            shape = SHAPES[i % len(SHAPES)]
            region = generate_region(rng.randrange(2**32), rng.randint(1, 90), shape)
            k = rng.choice((1, 2, 3, 5))
            d = rng.choice((math.inf, math.inf, 4, 9, 30))
            cfg = SimConfig(
                region, k, d=d, horizon=200, seed=rng.randrange(1000),
                pivot=rng.choice(("lexmin", "seeded")), check_invariants=True,
            )
            a, b = run(cfg), run(cfg)
            runs += 1
            viol.extend(a.violations)
            max_dist = max(max_dist, a.max_sensor_distance)
            nondet += dump_trace(a.trace) != dump_trace(b.trace)
            bad_replay += replay(a.trace, region, k) != a.final
        ok = not viol and max_dist <= 3 and nondet == 0 and bad_replay == 0
        criterion(
            8, ok,
            f"{runs} runs: {len(viol)} invariant violations, max sensor distance {max_dist}, "
            f"{nondet} nondeterministic traces, {bad_replay} replay mismatches",
        )
        assert ok, viol[:5]

    def test_c9_degenerate(self, criterion) -> None:
        cases = [Region([(0, 0)])]
        for n in range(2, 30):
            cases.append(Region((x, 0) for x in range(n)))
            cases.append(Region((0, y) for y in range(n)))
        bad = []
        for region in cases:
            for k in (1, 2):
                res = run(SimConfig(region, k, check_invariants=True))
                stalls = sum(e.event == "stall" for e in res.trace)
                if res.outcome.kind != "covered" or stalls or res.violations:
                    bad.append((region.area, k, str(res.outcome), res.violations[:1]))
        ok = not bad
        criterion(9, ok, f"{2 * len(cases)} singleton/line runs, {len(bad)} bad")
        assert ok, bad[:5]
