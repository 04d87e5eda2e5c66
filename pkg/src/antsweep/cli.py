"""Command-line entry point: ``antsweep run|bench|bounds|gen|render``.

Exit codes: 0 success, 2 an invariant or bound violation was detected,
3 bad input (unreadable or malformed files, invalid arguments).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import geometry
from .engine import ConfigError, SimConfig, TraceError, dump_trace, run
from .experiments import (
    SHAPES,
    ExperimentSpec,
    GeneratedRegion,
    bounds_report,
    generate_region,
    render_trace,
    run_experiment,
)
from .geometry import RegionError

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _spread_period(text: str) -> float:
    if text.lower() in ("inf", "infinity", "static"):
        return math.inf
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'inf', got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("d must be >= 1")
    return float(v)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _d_list(text: str) -> list[float]:
    return [_spread_period(v) for v in text.split(",") if v]


def _read_region(path: str) -> geometry.Region:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read region file {path}: {e.strerror}")
    return geometry.parse(text)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_run(args) -> int:
    region = _read_region(args.region)
    cfg = SimConfig(
        region, args.k, args.d, horizon=args.horizon, seed=args.seed,
        pivot=args.pivot, trace=args.trace_out is not None,
        check_invariants=not args.no_check,
    )
    res = run(cfg)
    if args.trace_out:
        _write(args.trace_out, dump_trace(res.trace))
    report = res.bound_report.to_dict()
    report["outcome"] = str(res.outcome)
    report["cleaned"] = res.cleaned
    report["invariant_violations"] = list(res.violations)
    report["max_sensor_distance"] = res.max_sensor_distance
    _write(args.report_out, json.dumps(report, indent=2) + "\n")
    rep = res.bound_report
    bad = (
        res.violations
        or rep.area_violations
        or rep.static_satisfied is False
        or rep.dynamic_satisfied is False
    )
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_bench(args) -> int:
    corpus: list = list(args.region or [])
    for shape in args.shapes:
        for area in args.areas:
            for seed in args.seeds:
                corpus.append(GeneratedRegion(seed, area, shape))
    if not corpus:
        raise InputError("bench needs --region files or --shapes/--areas/--seeds")
    spec = ExperimentSpec(
        tuple(corpus), tuple(args.k), tuple(args.d), horizon=args.horizon, jobs=args.jobs,
    )
    report = run_experiment(spec)
    _write(args.out, report.to_csv())
    sys.stderr.write(report.summary())
    if report.invariant_violations or report.area_violations or report.bound_failures:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_bounds(args) -> int:
    region = _read_region(args.region)
    _write(args.out, json.dumps(bounds_report(region, args.k, args.d), indent=2) + "\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    region = generate_region(args.seed, args.area, args.shape)
    _write(args.out, geometry.serialize(region))
    return EXIT_OK


def cmd_render(args) -> int:
    region = _read_region(args.region)
    try:
        trace = Path(args.trace).read_text()
    except OSError as e:
        raise InputError(f"cannot read trace file {args.trace}: {e.strerror}")
    paths = render_trace(trace, region, Path(args.out), stride=args.stride, scale=args.scale)
    sys.stdout.write(f"wrote {len(paths)} frames to {args.out}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="antsweep", description="SWEEP grid-coverage simulator and bounds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="simulate one region")
    r.add_argument("--region", required=True, help="REGION v1 file")
    r.add_argument("--k", type=int, required=True, help="number of agents")
    r.add_argument("--d", type=_spread_period, default=math.inf, help="spread period or 'inf'")
    r.add_argument("--horizon", type=int, default=None)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--pivot", choices=("lexmin", "seeded"), default="lexmin")
    r.add_argument("--trace-out", default=None, help="write the event trace here")
    r.add_argument("--report-out", default=None, help="bound report (default stdout)")
    r.add_argument("--no-check", action="store_true", help="skip per-tick invariant checks")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="batch experiment to a CSV table")
    b.add_argument("--region", action="append", help="REGION v1 file (repeatable)")
    b.add_argument("--shapes", type=lambda s: s.split(","), default=[])
    b.add_argument("--areas", type=_int_list, default=[])
    b.add_argument("--seeds", type=_int_list, default=[0])
    b.add_argument("--k", type=_int_list, required=True)
    b.add_argument("--d", type=_d_list, default=[math.inf])
    b.add_argument("--horizon", type=int, default=None)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", default=None, help="CSV output (default stdout)")
    b.set_defaults(func=cmd_bench)

    bo = sub.add_parser("bounds", help="evaluate bounds without simulating")
    bo.add_argument("--region", required=True)
    bo.add_argument("--k", type=int, required=True)
    bo.add_argument("--d", type=_spread_period, default=math.inf)
    bo.add_argument("--out", default=None)
    bo.set_defaults(func=cmd_bounds)

    g = sub.add_parser("gen", help="generate a region file")
    g.add_argument("--shape", choices=SHAPES, required=True)
    g.add_argument("--area", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    re_ = sub.add_parser("render", help="draw PNG frames from a trace")
    re_.add_argument("--trace", required=True)
    re_.add_argument("--region", required=True, help="initial region of the traced run")
    re_.add_argument("--out", required=True, help="output directory")
    re_.add_argument("--stride", type=int, default=1)
    re_.add_argument("--scale", type=int, default=8, help="pixels per tile")
    re_.set_defaults(func=cmd_render)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "shapes", None):
            bad = [s for s in args.shapes if s not in SHAPES]
            if bad:
                raise InputError(f"unknown shape class {bad[0]!r}")
        return args.func(args)
    except (InputError, RegionError, TraceError, ConfigError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
