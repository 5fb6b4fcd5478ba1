"""Command-line front end: phantom generation, volume estimation, method
comparison, convergence sweeps, and points-to-target search.

Output is byte-deterministic for fixed flags: no timestamps, fixed column
order, '.' decimal separator regardless of locale, volumes at six
significant digits.  Exit codes: 0 success, 2 usage error, 3 I/O or data
error.  The environment variable QVOL_THREADS caps worker threads
(0 or unset = auto).
"""

from __future__ import annotations

import argparse
import json
import sys

from .analysis import compare_methods, convergence_sweep, points_to_target
from .estimator import estimate_volume
from .maskio import MaskIOError, SliceGeometry, load_volume, save_volume
from .phantoms import Cone, Cube, Cuboid, Cylinder, PhantomSpec, analytic_volume, rasterize
from .sequences import DEFAULT_BASES, SequenceSpec

_FORMATS = ("human-table", "csv", "json-lines")

# Sweep default: geometric ladder 100 * 2^k capped at 1e5 points per slice.
_SWEEP_GRID = [100 * 2**k for k in range(10)]
# Points-to-target default: arithmetic ladder of tens, like the sweep floor.
_TARGET_GRID = list(range(10, 10001, 10))


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _fmt_opt(x: float | None) -> str:
    return "" if x is None else _fmt(x)


def _pct(e: float) -> str:
    return _fmt(e * 100.0) + "%"


def _parse_bases(text: str, parser: argparse.ArgumentParser) -> tuple[int, int]:
    parts = text.split(",")
    try:
        if len(parts) != 2:
            raise ValueError
        return int(parts[0]), int(parts[1])
    except ValueError:
        parser.error(f"--bases expects two comma-separated integers, got {text!r}")


def _parse_grid_arg(text: str, parser: argparse.ArgumentParser) -> list[int]:
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        parser.error(f"--grid expects comma-separated integers, got {text!r}")


def _parse_shape_grid(text: str, parser: argparse.ArgumentParser) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) != 3:
            raise ValueError
        w, h, z = (int(p) for p in parts)
    except ValueError:
        parser.error(f"--grid expects WxHxZ, got {text!r}")
    if min(w, h, z) < 1:
        parser.error(f"--grid dimensions must be positive, got {text!r}")
    return w, h, z


def _parse_floats(flag: str, text: str, n: int, parser: argparse.ArgumentParser) -> tuple[float, ...]:
    parts = text.split(",")
    try:
        if len(parts) != n:
            raise ValueError
        return tuple(float(p) for p in parts)
    except ValueError:
        parser.error(f"{flag} expects {n} comma-separated numbers, got {text!r}")


def _emit(lines) -> None:
    sys.stdout.write("".join(line + "\n" for line in lines))


def _add_format_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=_FORMATS, default="human-table", help="output format")
    sub.add_argument(
        "--display-unit",
        choices=("mm3", "cm3"),
        default="mm3",
        help="volume unit in human-table output (csv and json-lines always use mm3)",
    )


def _add_sequence_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--bases", default=None, help="Halton prime base pair, e.g. 2,11")
    sub.add_argument("--start-index", type=int, default=1, help="first Halton index consumed (>= 1)")
    sub.add_argument("--seed", type=int, default=None, help="pseudorandom seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qvol",
        description="Quasi-Monte Carlo volumetry for stacked-slice binary masks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ph = sub.add_parser("phantom", help="rasterize an analytic solid to a manifest + raw pair")
    ph.add_argument("--shape", required=True, choices=("cube", "cuboid", "cylinder", "cone"))
    ph.add_argument("--edge-mm", type=float, help="cube edge")
    ph.add_argument("--a-mm", type=float, help="cuboid x extent")
    ph.add_argument("--b-mm", type=float, help="cuboid y extent")
    ph.add_argument("--c-mm", type=float, help="cuboid z extent")
    ph.add_argument("--radius-mm", type=float, help="cylinder/cone base radius")
    ph.add_argument("--height-mm", type=float, help="cylinder/cone height")
    ph.add_argument("--grid", default="128x128x100", help="grid as WxHxZ (default 128x128x100)")
    ph.add_argument("--spacing-mm", default="1,1,1", help="dx,dy,thickness (default 1,1,1)")
    ph.add_argument("--center-mm", default=None, help="in-plane shape center cx,cy (default grid center)")
    ph.add_argument("--z0-mm", type=float, default=None, help="base plane of the shape (default centered)")
    ph.add_argument("--encoding", choices=("u8", "f32le"), default="u8")
    ph.add_argument("--out", required=True, help="output directory for volume.manifest + volume.raw")
    ph.set_defaults(func=cmd_phantom)

    vol = sub.add_parser("volume", help="estimate the region volume of a mask stack")
    vol.add_argument("--manifest", required=True)
    vol.add_argument("--method", choices=("halton", "mc"), default="halton")
    vol.add_argument("--points", type=int, required=True, help="points per slice")
    vol.add_argument("--truth", type=float, default=None, help="ground-truth volume in mm3")
    vol.add_argument("--per-slice", action="store_true", help="also report per-slice areas")
    vol.add_argument(
        "--restart-per-slice",
        action="store_true",
        help="re-sample the same stream window on every slice instead of advancing",
    )
    _add_sequence_flags(vol)
    _add_format_flags(vol)
    vol.set_defaults(func=cmd_volume)

    cmp_ = sub.add_parser("compare", help="run both methods on one mask from identical inputs")
    cmp_.add_argument("--manifest", required=True)
    cmp_.add_argument("--points", type=int, required=True)
    cmp_.add_argument("--truth", type=float, required=True)
    _add_sequence_flags(cmp_)
    _add_format_flags(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    conv = sub.add_parser("converge", help="relative error of both methods across a point grid")
    conv.add_argument("--manifest", required=True)
    conv.add_argument("--truth", type=float, required=True)
    conv.add_argument("--grid", default=None, help="comma-separated points-per-slice grid")
    conv.add_argument("--seeds", type=int, default=20, help="pseudorandom seeds per grid point")
    conv.add_argument("--base-seed", type=int, default=0)
    conv.add_argument("--bases", default=None)
    conv.add_argument("--start-index", type=int, default=1)
    _add_format_flags(conv)
    conv.set_defaults(func=cmd_converge)

    ptt = sub.add_parser("points-to-target", help="first grid N reaching a relative-error target")
    ptt.add_argument("--manifest", required=True)
    ptt.add_argument("--truth", type=float, required=True)
    ptt.add_argument("--target", type=float, required=True, help="relative-error target in (0, 1)")
    ptt.add_argument("--grid", default=None, help="comma-separated points-per-slice grid")
    ptt.add_argument("--seeds", type=int, default=20)
    ptt.add_argument("--base-seed", type=int, default=0)
    ptt.add_argument("--bases", default=None)
    ptt.add_argument("--start-index", type=int, default=1)
    _add_format_flags(ptt)
    ptt.set_defaults(func=cmd_points_to_target)

    return parser


def _build_shape(args, parser):
    def need(flag, value):
        if value is None:
            parser.error(f"{flag} is required for --shape {args.shape}")
        return value

    if args.shape == "cube":
        return Cube(edge_mm=need("--edge-mm", args.edge_mm))
    if args.shape == "cuboid":
        return Cuboid(
            a_mm=need("--a-mm", args.a_mm),
            b_mm=need("--b-mm", args.b_mm),
            c_mm=need("--c-mm", args.c_mm),
        )
    if args.shape == "cylinder":
        return Cylinder(
            radius_mm=need("--radius-mm", args.radius_mm),
            height_mm=need("--height-mm", args.height_mm),
        )
    return Cone(
        base_radius_mm=need("--radius-mm", args.radius_mm),
        height_mm=need("--height-mm", args.height_mm),
    )


def cmd_phantom(args, parser) -> int:
    from pathlib import Path

    shape = _build_shape(args, parser)
    w, h, z = _parse_shape_grid(args.grid, parser)
    dx, dy, t = _parse_floats("--spacing-mm", args.spacing_mm, 3, parser)
    center = _parse_floats("--center-mm", args.center_mm, 2, parser) if args.center_mm else None
    try:
        geometry = SliceGeometry(width_px=w, height_px=h, dx_mm=dx, dy_mm=dy, thickness_mm=t)
        spec = PhantomSpec(shape=shape, geometry=geometry, num_slices=z, center_mm=center, z0_mm=args.z0_mm)
    except ValueError as exc:
        parser.error(str(exc))
    volume = rasterize(spec)
    save_volume(volume, Path(args.out) / "volume.manifest", args.encoding)
    _emit([f"true_volume_mm3={_fmt(analytic_volume(spec))}"])
    return 0


def _sequence_spec(args, parser) -> SequenceSpec:
    if args.method == "halton":
        if args.seed is not None:
            parser.error("--seed is only valid with --method mc")
        bases = _parse_bases(args.bases, parser) if args.bases else DEFAULT_BASES
        try:
            return SequenceSpec.halton(bases, args.start_index)
        except ValueError as exc:
            parser.error(str(exc))
    if args.bases is not None:
        parser.error("--bases is only valid with --method halton")
    try:
        return SequenceSpec.pseudorandom(args.seed if args.seed is not None else 0)
    except ValueError as exc:
        parser.error(str(exc))


def cmd_volume(args, parser) -> int:
    if args.points < 1:
        parser.error(f"--points must be >= 1, got {args.points}")
    spec = _sequence_spec(args, parser)
    volume = load_volume(args.manifest)
    if args.truth is not None and not args.truth > 0.0:
        parser.error(f"--truth must be positive, got {args.truth}")
    report = estimate_volume(volume, spec, args.points, args.truth, restart_per_slice=args.restart_per_slice)

    if args.format == "csv":
        if args.per_slice:
            lines = ["slice,hits,total,area_mm2"]
            lines += [f"{e.slice_index},{e.hits},{e.total},{_fmt(e.area_mm2)}" for e in report.per_slice]
        else:
            lines = [
                "volume_mm3,volume_cm3,relative_error",
                f"{_fmt(report.volume_mm3)},{_fmt(report.volume_mm3 / 1000.0)},{_fmt_opt(report.relative_error)}",
            ]
        _emit(lines)
    elif args.format == "json-lines":
        summary = {
            "volume_mm3": report.volume_mm3,
            "volume_cm3": report.volume_mm3 / 1000.0,
            "method": report.method,
            "points_per_slice": report.points_per_slice,
            "truth_mm3": report.truth_mm3,
            "relative_error": report.relative_error,
        }
        lines = [json.dumps(summary)]
        if args.per_slice:
            lines += [
                json.dumps({"slice": e.slice_index, "hits": e.hits, "total": e.total, "area_mm2": e.area_mm2})
                for e in report.per_slice
            ]
        _emit(lines)
    else:
        lines = [
            f"volume_mm3 = {_fmt(report.volume_mm3)}",
            f"volume_cm3 = {_fmt(report.volume_mm3 / 1000.0)}",
            f"method = {report.method}",
            f"points_per_slice = {report.points_per_slice}",
        ]
        if report.relative_error is not None:
            lines.append(f"truth_mm3 = {_fmt(report.truth_mm3)}")
            lines.append(f"relative_error = {_pct(report.relative_error)}")
        if args.per_slice:
            lines.append("slice  hits  total  area_mm2")
            lines += [
                f"{e.slice_index:>5}  {e.hits:>4}  {e.total:>5}  {_fmt(e.area_mm2)}"
                for e in report.per_slice
            ]
        _emit(lines)
    return 0


def cmd_compare(args, parser) -> int:
    if args.points < 1:
        parser.error(f"--points must be >= 1, got {args.points}")
    if not args.truth > 0.0:
        parser.error(f"--truth must be positive, got {args.truth}")
    bases = _parse_bases(args.bases, parser) if args.bases else DEFAULT_BASES
    volume = load_volume(args.manifest)
    try:
        rows = compare_methods(
            volume,
            args.truth,
            args.points,
            args.seed if args.seed is not None else 0,
            bases,
            start_index=args.start_index,
        )
    except ValueError as exc:
        parser.error(str(exc))

    if args.format == "csv":
        lines = ["method,volume_mm3,relative_error"]
        lines += [f"{r.method},{_fmt(r.volume_mm3)},{_fmt(r.relative_error)}" for r in rows]
    elif args.format == "json-lines":
        lines = [
            json.dumps({"method": r.method, "volume_mm3": r.volume_mm3, "relative_error": r.relative_error})
            for r in rows
        ]
    else:
        unit_div = 1000.0 if args.display_unit == "cm3" else 1.0
        lines = [f"method  volume_{args.display_unit}  relative_error"]
        lines += [f"{r.method:<7} {_fmt(r.volume_mm3 / unit_div):>12}  {_pct(r.relative_error)}" for r in rows]
    _emit(lines)
    return 0


def cmd_converge(args, parser) -> int:
    if not args.truth > 0.0:
        parser.error(f"--truth must be positive, got {args.truth}")
    grid = _parse_grid_arg(args.grid, parser) if args.grid else _SWEEP_GRID
    bases = _parse_bases(args.bases, parser) if args.bases else DEFAULT_BASES
    volume = load_volume(args.manifest)
    try:
        report = convergence_sweep(
            volume,
            args.truth,
            grid,
            args.seeds,
            bases,
            base_seed=args.base_seed,
            start_index=args.start_index,
        )
    except ValueError as exc:
        parser.error(str(exc))

    columns = ("n", "qmc_error", "mc_error_mean", "mc_error_std", "theory_qmc", "theory_mc")
    rows = zip(report.n_grid, report.qmc_errors, report.mc_error_mean, report.mc_error_std,
               report.theory_qmc, report.theory_mc)
    if args.format == "csv":
        lines = [",".join(columns)]
        lines += [f"{n},{_fmt(q)},{_fmt(m)},{_fmt(s)},{_fmt(tq)},{_fmt(tm)}" for n, q, m, s, tq, tm in rows]
    elif args.format == "json-lines":
        lines = [
            json.dumps(dict(zip(columns, (n, q, m, s, tq, tm))))
            for n, q, m, s, tq, tm in rows
        ]
    else:
        lines = ["".join(f"{c:>14}" for c in columns)]
        lines += [
            f"{n:>14}" + "".join(f"{_fmt(v):>14}" for v in (q, m, s, tq, tm))
            for n, q, m, s, tq, tm in rows
        ]
    _emit(lines)
    return 0


def cmd_points_to_target(args, parser) -> int:
    if not args.truth > 0.0:
        parser.error(f"--truth must be positive, got {args.truth}")
    if not 0.0 < args.target < 1.0:
        parser.error(f"--target must be in (0, 1), got {args.target}")
    grid = _parse_grid_arg(args.grid, parser) if args.grid else _TARGET_GRID
    bases = _parse_bases(args.bases, parser) if args.bases else DEFAULT_BASES
    volume = load_volume(args.manifest)
    try:
        result = points_to_target(
            volume,
            args.truth,
            args.target,
            grid,
            args.seeds,
            bases,
            base_seed=args.base_seed,
            start_index=args.start_index,
        )
    except ValueError as exc:
        parser.error(str(exc))

    if args.format == "csv":
        n_mc = "" if result.n_mc is None else str(result.n_mc)
        n_qmc = "" if result.n_qmc is None else str(result.n_qmc)
        lines = ["target,n_mc,n_qmc,ratio", f"{_fmt(result.target)},{n_mc},{n_qmc},{_fmt_opt(result.ratio)}"]
    elif args.format == "json-lines":
        lines = [
            json.dumps(
                {"target": result.target, "n_mc": result.n_mc, "n_qmc": result.n_qmc, "ratio": result.ratio}
            )
        ]
    else:
        lines = [
            f"target = {_fmt(result.target)}",
            f"n_mc = {'not-reached' if result.n_mc is None else result.n_mc}",
            f"n_qmc = {'not-reached' if result.n_qmc is None else result.n_qmc}",
            f"ratio = {'undefined' if result.ratio is None else _fmt(result.ratio)}",
        ]
    _emit(lines)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except MaskIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    raise SystemExit(main())
