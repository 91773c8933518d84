"""Command-line entry point.

Every leaf command accepts ``--quad-step``, ``--out`` and ``--seed``. Their
defaults can be set through ``SPLINEGABOR_QUAD_STEP``, ``SPLINEGABOR_OUT`` and
``SPLINEGABOR_SEED``; an explicit flag wins. Exit codes: 0 success, 1
computation or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bench import BenchConfig, parse_config, run_bench, write_report, _parse_number
from .duals import NAMED_DUALS, _ALIASES, build_duals, resolve_dual_name
from .errors import ConfigError, SplineGaborError
from .gabor import Lattice, duality_residual
from .grid import QUAD_STEP, Grid
from .plotdata import FIGURES, plot_emit
from .signals import SIGNALS, NoiseConfig, add_noise, make_signal, map_to_interval
from .windows import generator_window

ENV_PREFIX = "SPLINEGABOR_"
WINDOW_CHOICES = ("b2", "b3", "eps3")
DUAL_CHOICES = tuple(sorted(_ALIASES)) + tuple(NAMED_DUALS)


class UsageError(Exception):
    pass


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name, default)


def _number(text):
    try:
        return _parse_number(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _span(text, parts=2):
    pieces = text.split(":")
    if len(pieces) != parts:
        raise argparse.ArgumentTypeError(f"expected {':'.join(['x'] * parts)}, got {text!r}")
    return tuple(_number(p) for p in pieces)


def _common(p: argparse.ArgumentParser):
    env_step = _env("QUAD_STEP")
    env_seed = _env("SEED")
    p.add_argument("--quad-step", type=_number, default=_number(env_step) if env_step else None,
                   help=f"quadrature / sampling step (default 1/8192; env {ENV_PREFIX}QUAD_STEP)")
    p.add_argument("--out", default=_env("OUT"),
                   help=f"output directory; stdout when omitted where possible (env {ENV_PREFIX}OUT)")
    p.add_argument("--seed", type=int, default=int(env_seed) if env_seed else None,
                   help=f"noise seed (env {ENV_PREFIX}SEED)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splinegabor", allow_abbrev=False,
                                     description="Spline-window Gabor frames: windows, duals, checks, benchmark.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", required=True)

    def leaf(group_parser, name, help_text):
        p = group_parser.add_parser(name, help=help_text, allow_abbrev=False)
        _common(p)
        return p

    windows = top.add_parser("windows", help="generator windows").add_subparsers(dest="cmd", required=True)
    p = leaf(windows, "dump", "sample a generator window as CSV (x, value)")
    p.add_argument("--window", choices=WINDOW_CHOICES, required=True)
    p.add_argument("--p", type=_number, default=1.0, help="eps3 rate parameter")
    p.add_argument("--eps3-shift", type=_number, default=1.5, help="eps3 is evaluated as eps3(x + shift)")
    p.add_argument("--grid", type=lambda s: _span(s, 3), default=None, metavar="LO:HI:STEP")
    p.set_defaults(func=cmd_windows_dump)

    duals = top.add_parser("duals", help="dual windows").add_subparsers(dest="cmd", required=True)
    p = leaf(duals, "build", "construct a dual window; CSV (x, value) plus JSON metadata")
    p.add_argument("--window", choices=WINDOW_CHOICES, required=True)
    p.add_argument("--dual", choices=DUAL_CHOICES, required=True)
    p.add_argument("--a", type=_number, default=1.0)
    p.add_argument("--b", type=_number, default=0.2)
    p.add_argument("--p", type=_number, default=1.0)
    p.add_argument("--j-max", type=int, default=None)
    p.add_argument("--step", type=_number, default=1 / 256, help="spacing of the emitted samples")
    p.set_defaults(func=cmd_duals_build)

    check = top.add_parser("check", help="certificates").add_subparsers(dest="cmd", required=True)
    p = leaf(check, "duality", "print the duality residual; exit 1 above --tol")
    p.add_argument("--window", choices=WINDOW_CHOICES, required=True)
    p.add_argument("--dual", choices=DUAL_CHOICES, required=True)
    p.add_argument("--b", type=_number, default=0.2)
    p.add_argument("--p", type=_number, default=1.0)
    p.add_argument("--nmax", type=int, default=None, help="largest |n| checked (default: every overlap)")
    p.add_argument("--tol", type=_number, default=1e-5)
    p.set_defaults(func=cmd_check_duality)

    signals = top.add_parser("signals", help="test signals").add_subparsers(dest="cmd", required=True)
    p = leaf(signals, "dump", "sample a test signal as CSV (t, value[, noisy replications])")
    p.add_argument("--kind", choices=SIGNALS, required=True, type=lambda s: next((k for k in SIGNALS if k.lower() == s.lower()), s))
    p.add_argument("--count", type=int, default=2048)
    p.add_argument("--map", type=_span, default=None, metavar="LO:HI", help="affine target interval")
    p.add_argument("--sigma", type=_number, default=0.0)
    p.add_argument("--reps", type=int, default=1)
    p.set_defaults(func=cmd_signals_dump)

    bench = top.add_parser("bench", help="AMSE benchmark").add_subparsers(dest="cmd", required=True)
    p = leaf(bench, "amse", "run the AMSE table; writes amse.csv, orderings.txt, manifest.json")
    p.add_argument("--config", help="key = value config file, or a manifest.json from an earlier run")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench_amse)

    plot = top.add_parser("plot", help="figure data").add_subparsers(dest="cmd", required=True)
    p = leaf(plot, "emit", "write one CSV per curve plus legend.txt into --out")
    p.add_argument("--figure", choices=FIGURES, required=True)
    p.add_argument("--p", type=_number, default=1.0)
    p.set_defaults(func=cmd_plot_emit)
    return parser


# -- helpers --------------------------------------------------------------------

def _step(args) -> float:
    step = QUAD_STEP if args.quad_step is None else args.quad_step
    if not step > 0:
        raise UsageError(f"--quad-step must be positive, got {step}")
    return step


def _emit(args, filename: str, text: str) -> Path | None:
    if args.out is None:
        sys.stdout.write(text)
        return None
    out = Path(args.out)
    if not out.is_dir():
        raise OSError(f"output directory does not exist: {out}")
    path = out / filename
    path.write_text(text)
    return path


def _csv(header, *cols) -> str:
    lines = [header]
    for row in zip(*(np.asarray(c, dtype=float).tolist() for c in cols)):
        lines.append(",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def _window(args, shift=1.5):
    return generator_window(args.window, args.p, shift)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# -- commands -------------------------------------------------------------------

def cmd_windows_dump(args) -> int:
    w = _window(args, args.eps3_shift)
    if args.grid is None:
        lo, hi = w.support
        x = Grid.aligned(lo, hi, _step(args) if args.quad_step else 1 / 256).points
    else:
        lo, hi, step = args.grid
        if not (step > 0 and hi > lo):
            raise UsageError("--grid needs hi > lo and step > 0")
        x = Grid.from_range(lo, hi, step).points
    _emit(args, f"{args.window}.csv", _csv("x,value", x, w(x)))
    return 0


def cmd_duals_build(args) -> int:
    name = resolve_dual_name(args.dual)
    if name != "Sinv_g" and abs(args.a - 1) > 1e-12:
        raise UsageError("only a = 1 is supported for the translate-based duals")
    lattice = Lattice(args.a, args.b)
    g = _window(args)
    h = build_duals(g, [name], lattice, _step(args), j_max=args.j_max)[name]
    x = Grid.aligned(h.support[0], h.support[1], args.step).points
    meta = {"window": args.window, "dual": name, "label": h.label, "a": args.a, "b": args.b,
            "support": list(h.support)}
    if abs(args.a - 1) <= 1e-12:
        meta["duality_residual"] = duality_residual(g, h, lattice, _step(args))
    for key in ("K", "tail", "j_max", "inner_products", "N", "levels"):
        if key in h.meta:
            meta[key] = h.meta[key]
    meta = _jsonable(meta)
    stem = f"{args.window}_{name}"
    csv_text = _csv("x,value", x, h(x))
    if args.out is None:
        sys.stdout.write(csv_text)
        sys.stderr.write(json.dumps(meta) + "\n")
    else:
        _emit(args, stem + ".csv", csv_text)
        _emit(args, stem + ".json", json.dumps(meta, indent=2) + "\n")
    return 0


def cmd_check_duality(args) -> int:
    name = resolve_dual_name(args.dual)
    lattice = Lattice(1.0, args.b)
    g = _window(args)
    h = build_duals(g, [name], lattice, _step(args))[name]
    try:
        res = duality_residual(g, h, lattice, _step(args), args.nmax)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    verdict = "ok" if res <= args.tol else "FAIL"
    text = f"{args.window} {name} b={args.b:g} residual={res:.6e} tol={args.tol:g} {verdict}\n"
    _emit(args, f"check_{args.window}_{name}.txt", text)
    if args.out is not None:
        sys.stdout.write(text)
    return 0 if res <= args.tol else 1


def cmd_signals_dump(args) -> int:
    if args.count < 2:
        raise UsageError("--count must be >= 2")
    f = make_signal(args.kind, args.count)
    if args.map is not None:
        f = map_to_interval(f, *args.map)
    seed = 42 if args.seed is None else args.seed
    try:
        noise = NoiseConfig(args.sigma, args.reps, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cols, header = [f.t, f.values], "t,value"
    if noise.sigma > 0:
        for r in range(noise.replications):
            cols.append(add_noise(f, noise, r).values)
            header += f",rep_{r}"
    _emit(args, f"{args.kind.lower()}.csv", _csv(header, *cols))
    return 0


def cmd_bench_amse(args) -> int:
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        config = parse_config(text)
    else:
        config = BenchConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.quad_step is not None:
        overrides["quad_step"] = args.quad_step
    if overrides:
        config = replace(config, **overrides)
    out = Path(args.out or "bench-out")
    out.mkdir(parents=True, exist_ok=True)
    report = run_bench(config, workers=args.workers)
    paths = write_report(report, out)
    bad = len(report.errored)
    print(f"{len(report.cells)} cells, {bad} errored; wrote {', '.join(str(p) for p in paths)}")
    return 1 if bad else 0


def cmd_plot_emit(args) -> int:
    if args.out is None:
        raise UsageError("plot emit needs --out")
    paths = plot_emit(args.figure, args.out, p=args.p, quad_step=_step(args))
    print(f"wrote {len(paths)} files to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, ValueError) as exc:
        # includes the ValueError-derived parameter errors such as an inadmissible b
        parser.exit(2, f"splinegabor: error: {exc}\n")
    except SplineGaborError as exc:
        print(f"splinegabor: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"splinegabor: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
