"""Command-line driver.

Subcommands cover the main workflows: padding rasters, tabulating NMSE
curves, cross-checking the two fitting routes against each other, stitching
tiled runs, and timing the padding methods.  Data goes to standard output or
files; warnings and errors go to standard error.  Exit codes: 0 success,
1 failure while running, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys


def _method_arg(name: str):
    from .pad import parse_method

    try:
        return parse_method(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _size_arg(text: str) -> int:
    value = int(text)
    if value < 8:
        raise argparse.ArgumentTypeError(f"size must be at least 8, got {value}")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    from .pad import CANONICAL_METHODS
    from .theory import THEORY_METHODS

    parser = argparse.ArgumentParser(
        prog="lppad", description="Linear prediction image padding tools."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pad", help="pad a raster file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument(
        "--method", type=_method_arg, default="lp2x3",
        help=f"one of {', '.join(CANONICAL_METHODS)} or extrN",
    )
    p.add_argument("--all", type=int, default=None, help="pixels on every side")
    for side in ("top", "bottom", "left", "right"):
        p.add_argument(f"--{side}", type=int, default=0)

    n = sub.add_parser("nmse-curve", help="tabulate theoretical NMSE curves")
    n.add_argument("--sigma-min", type=_positive, default=0.25)
    n.add_argument("--sigma-max", type=_positive, default=8.0)
    n.add_argument("--points", type=int, default=24)
    n.add_argument(
        "--methods", nargs="+", default=list(THEORY_METHODS),
        choices=list(THEORY_METHODS),
    )
    n.add_argument("--mc-trials", type=int, default=0)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--out", default=None, help="CSV path (default: stdout)")

    x = sub.add_parser("xcorr-check", help="cross-check the two fitting routes")
    x.add_argument("--size", type=_size_arg, default=48)
    x.add_argument("--seed", type=int, default=0)

    t = sub.add_parser("tiling-demo", help="stitch a tiled run and report seams")
    t.add_argument("--input", required=True)
    t.add_argument("--method", type=_method_arg, default="lp2x3")
    t.add_argument("--tile", type=int, required=True)
    t.add_argument("--crop", type=int, default=0)
    t.add_argument("--out-prefix", required=True)

    b = sub.add_parser("bench", help="time every padding method")
    b.add_argument("--size", type=int, default=256)
    b.add_argument("--pad", type=int, default=24)
    b.add_argument("--repeats", type=int, default=3)
    return parser


def cmd_pad(args) -> int:
    import numpy as np

    from .geometry import PASS_ORDER
    from .io import read_raster, write_raster
    from .pad import PadAmounts, fit_models, pad

    raster = read_raster(args.input)
    if args.all is not None:
        amounts = PadAmounts.uniform(args.all)
    else:
        amounts = PadAmounts(args.top, args.bottom, args.left, args.right)
    padded = pad(raster, args.method, amounts)
    write_raster(padded, args.output)
    if args.method.kind == "lp":
        for channel, models in enumerate(fit_models(raster, args.method)):
            for direction in PASS_ORDER:
                coeffs = models[direction].coefficients
                for i, a in enumerate(coeffs, start=1):
                    sys.stdout.write(f"{channel},{direction.value},{i},{a:.17g}\n")
    return 0


def cmd_nmse_curve(args) -> int:
    from .theory import (
        empirical_curves,
        nmse_curves,
        write_curves_csv,
    )
    import numpy as np

    if args.points < 1:
        raise ValueError("--points must be at least 1")
    if args.sigma_max < args.sigma_min:
        raise ValueError("--sigma-max must not be below --sigma-min")
    if args.points == 1:
        grid = np.array([args.sigma_min])
    else:
        grid = np.geomspace(args.sigma_min, args.sigma_max, args.points)
    methods = tuple(args.methods)
    theory = nmse_curves(grid, methods)

    def emit(fh):
        if args.mc_trials > 0:
            mc = empirical_curves(grid, methods, args.mc_trials, args.seed)
            writer = csv.writer(fh)
            writer.writerow(["method", "sigma", "nmse", "mc_nmse", "mc_stderr"])
            for th, em in zip(theory, mc):
                for i in range(len(grid)):
                    writer.writerow(
                        [
                            th.method,
                            f"{grid[i]:.17g}",
                            f"{th.nmse[i]:.17g}",
                            f"{em.nmse[i]:.17g}",
                            f"{em.stderr[i]:.17g}",
                        ]
                    )
        else:
            write_curves_csv(theory, fh)

    if args.out is None:
        emit(sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            emit(fh)
    return 0


def cmd_xcorr_check(args) -> int:
    import numpy as np

    from .autocorrelation import (
        autocorrelation_direct,
        autocorrelation_fft,
        covariance_from_autocorrelation,
        prepare_windowed,
    )
    from .covariance import covariance_statistics, solve_general, solve_p1, solve_p2
    from .geometry import canonical_neighborhood
    from .pad import _LP_METHODS

    plane = np.random.default_rng(args.seed).standard_normal((args.size, args.size))

    fft_err = 0.0
    padded = prepare_windowed(plane)
    dense = autocorrelation_fft(padded)
    shapes = sorted({cfg[0] for cfg in _LP_METHODS.values()})
    for height, width in shapes:
        nbhd = canonical_neighborhood(height, width)
        lags = {
            (hi[0] - hj[0], hi[1] - hj[1])
            for hi in nbhd.offsets
            for hj in nbhd.offsets
        }
        table = autocorrelation_direct(padded, lags)
        r_direct = covariance_from_autocorrelation(table, nbhd)
        r_fft = covariance_from_autocorrelation(dense, nbhd)
        scale = np.abs(r_fft).max()
        fft_err = max(fft_err, float(np.abs(r_direct - r_fft).max() / scale))

    solver_err = 0.0
    centered = plane - plane.mean()
    for p, solver in ((1, solve_p1), (2, solve_p2)):
        r = covariance_statistics(centered, canonical_neighborhood(p, 1))
        closed = solver(r)
        general = solve_general(r, ridge=0.0)
        denom = max(float(np.abs(general).max()), 1e-12)
        solver_err = max(solver_err, float(np.abs(closed - general).max() / denom))

    sys.stdout.write(f"fft-vs-direct max relative error: {fft_err:.17g}\n")
    sys.stdout.write(f"closed-form-vs-cholesky max relative error: {solver_err:.17g}\n")
    return 0 if max(fft_err, solver_err) <= 1e-8 else 1


def cmd_tiling_demo(args) -> int:
    import numpy as np

    from .io import read_raster, write_raster
    from .tiling import (
        ConvPipeline,
        ConvStage,
        default_pipeline,
        run_pipeline,
        shell_mse,
        stitch_tiles,
    )

    raster = read_raster(args.input)
    pipeline = default_pipeline()
    radius = pipeline.receptive_radius
    if args.crop > radius:
        raise ValueError(f"--crop must not exceed the receptive radius {radius}")
    stitched = stitch_tiles(raster, pipeline, args.method, args.tile, args.crop)
    all_valid = ConvPipeline(
        tuple(ConvStage(s.kernel, "valid") for s in pipeline.stages)
    )
    reference = run_pipeline(raster, all_valid, args.method)
    inset = radius - args.crop
    window = stitched[
        inset : inset + reference.shape[0], inset : inset + reference.shape[1]
    ]
    deviation = np.abs(window - reference)
    write_raster(stitched, f"{args.out_prefix}-stitched.f64")
    write_raster(deviation, f"{args.out_prefix}-deviation.f64")
    report = shell_mse(window, reference)
    with open(f"{args.out_prefix}-shells.csv", "w", newline="") as fh:
        fh.write(report.to_csv())
    sys.stdout.write(f"max deviation: {float(deviation.max()):.17g}\n")
    return 0


def cmd_bench(args) -> int:
    import time

    import numpy as np

    from .pad import CANONICAL_METHODS, pad

    plane = np.random.default_rng(0).standard_normal((args.size, args.size))
    writer = csv.writer(sys.stdout)
    writer.writerow(["method", "seconds"])
    for method in CANONICAL_METHODS:
        best = min(
            _timed(pad, plane, method, args.pad, clock=time.perf_counter)
            for _ in range(max(args.repeats, 1))
        )
        writer.writerow([method, f"{best:.6f}"])
    return 0


def _timed(fn, plane, method, amount, clock) -> float:
    start = clock()
    fn(plane, method, amount)
    return clock() - start


def _apply_thread_cap() -> object | None:
    """Honor LP_PAD_THREADS by capping the numeric libraries' thread pools.

    Returns the limiter so its lifetime spans the whole invocation.  An
    unset variable leaves the pools alone.
    """
    raw = os.environ.get("LP_PAD_THREADS")
    if raw is None:
        return None
    try:
        limit = int(raw)
        if limit < 1:
            raise ValueError
    except ValueError:
        raise SystemExit(
            f"lppad: LP_PAD_THREADS must be a positive integer, got {raw!r}"
        ) from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=limit)


_COMMANDS = {
    "pad": cmd_pad,
    "nmse-curve": cmd_nmse_curve,
    "xcorr-check": cmd_xcorr_check,
    "tiling-demo": cmd_tiling_demo,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    try:
        limiter = _apply_thread_cap()
    except SystemExit as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"lppad: {exc}\n")
        return 1
    finally:
        del limiter


if __name__ == "__main__":
    sys.exit(main())
