"""AMSE benchmark over every (generator, dual, signal) cell.

Two noise profiles ship. ``clean`` measures the pure truncation error of the
|m|, |n| <= 3 expansion. ``noisy`` adds Gaussian noise with deviation
``sigma_rel * RMS(signal)`` and averages over replications, comparing each
reconstruction with the clean signal.

Config files are flat ``key = value`` text; ``#`` starts a comment. Ranges are
written ``lo:hi`` and lists are comma separated::

    b = 0.2
    m_range = -3:3
    map_interval = -3:3
    generators = B2, B3, eps3
    j_max = auto
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .duals import DUAL_ORDER, build_duals, resolve_dual_name
from .errors import ConfigError, GridMismatchError, SplineGaborError
from .gabor import Lattice, duality_residual, reconstruct
from .grid import QUAD_STEP, SampledSignal
from .signals import SIGNALS, NoiseConfig, add_noise, make_signal, map_to_interval, rms, zero_pad
from .windows import GENERATORS, generator_window, recenter

PROFILES = ("clean", "noisy")
TIE_TOL = 1e-12

#: Published AMSE values, keyed (generator, dual, signal).
REFERENCE_AMSE = {}
_REFERENCE_ROWS = {
    "Sinv_g": ([3.4992, 0.4331, 8.0253, 0.0795, 0.4947], [3.4338, 0.4313, 7.9552, 0.0798, 0.4947],
               [3.3699, 0.4299, 7.8296, 0.0804, 0.4947]),
    "h": ([3.3969, 0.4348, 7.8954, 0.0798, 0.4948], [3.3889, 0.4345, 7.8980, 0.0798, 0.4948],
          [3.4120, 0.4330, 7.8363, 0.0799, 0.4948]),
    "k": ([3.3877, 0.4303, 7.8626, 0.0803, 0.4947], [3.3880, 0.4303, 7.8638, 0.0803, 0.4947],
          [3.3877, 0.4303, 7.8626, 0.0803, 0.4947]),
    "h2": ([6.2686, 0.5329, 9.7382, 0.0858, 0.4959], [6.8218, 0.5528, 10.0742, 0.0861, 0.4955],
           [4.7187, 0.4924, 8.1825, 0.0789, 0.4951]),
    "k2": ([3.8635, 0.4467, 8.3592, 0.0867, 0.4958], [4.2184, 0.4654, 8.6151, 0.0845, 0.4955],
           [4.8828, 0.4960, 8.6258, 0.0818, 0.4951]),
    "phi_h": ([3.4246, 0.4339, 7.8875, 0.0797, 0.4947], [3.3933, 0.4332, 7.8971, 0.0798, 0.4947],
              [3.3866, 0.4318, 7.8315, 0.0799, 0.4947]),
    "phi_k": ([3.4225, 0.4312, 7.9026, 0.0800, 0.4947], [3.3975, 0.4305, 7.8910, 0.0802, 0.4947],
              [3.3795, 0.4301, 7.8342, 0.0803, 0.4947]),
    "phi_Sinv_g": ([3.4946, 0.4329, 8.0476, 0.0795, 0.4947], [3.4319, 0.4312, 7.9652, 0.0798, 0.4947],
                   [3.3716, 0.4300, 7.8159, 0.0804, 0.4947]),
}
for _dual, _rows in _REFERENCE_ROWS.items():
    for _gen, _row in zip(GENERATORS, _rows):
        for _sig, _val in zip(SIGNALS, _row):
            REFERENCE_AMSE[(_gen, _dual, _sig)] = _val


# -- configuration -----------------------------------------------------------------

@dataclass(frozen=True)
class BenchConfig:
    a: float = 1.0
    b: float = 0.2
    m_range: tuple = (-3, 3)
    n_range: tuple = (-3, 3)
    count: int = 2048
    map_interval: tuple = (-3.0, 3.0)
    quad_step: float = QUAD_STEP
    p: float = 1.0
    eps3_shift: float = 1.5
    bessel_scale: float = 0.1
    j_max: int | None = None
    tail_tol: float = 1e-6
    cert_tol: float = 1e-5
    generators: tuple = GENERATORS
    duals: tuple = DUAL_ORDER
    signals: tuple = SIGNALS
    profiles: tuple = PROFILES
    sigma_rel: float = 0.1
    replications: int = 30
    seed: int = 42

    def __post_init__(self):
        validate_config(self)

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.a, self.b)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> BenchConfig:
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None


def generator_order(name: str) -> int:
    return {"b2": 2, "b3": 3, "eps3": 3}[name.lower()]


def b_bound(name: str) -> float:
    """Largest admissible ``b``: ``1/(2N - 1)`` for the symmetric dual."""
    return 1.0 / (2 * generator_order(name) - 1)


def _canon(name: str, choices, what: str) -> str:
    for c in choices:
        if c.lower() == str(name).lower():
            return c
    raise ConfigError(f"unknown {what} {name!r}; choose from {', '.join(choices)}")


def validate_config(c: BenchConfig) -> None:
    def fail(msg):
        raise ConfigError(msg)

    if abs(c.a - 1.0) > 1e-12:
        fail(f"a must be 1 (duality is certified for integer translates only), got {c.a}")
    for name in ("m_range", "n_range", "map_interval"):
        r = getattr(c, name)
        if len(r) != 2:
            fail(f"{name} needs two entries, got {r!r}")
    if c.m_range[0] > c.m_range[1] or c.n_range[0] > c.n_range[1]:
        fail("m_range and n_range must be nonempty (lo <= hi)")
    if not c.map_interval[1] > c.map_interval[0]:
        fail(f"map_interval must satisfy hi > lo, got {c.map_interval}")
    if c.count < 2:
        fail(f"count must be >= 2, got {c.count}")
    if not c.quad_step > 0:
        fail(f"quad_step must be positive, got {c.quad_step}")
    if not c.p > 0:
        fail(f"p must be positive, got {c.p}")
    if not c.cert_tol > 0:
        fail("cert_tol must be positive")
    if c.j_max is not None and c.j_max < 1:
        fail(f"j_max must be >= 1 or auto, got {c.j_max}")
    if c.sigma_rel < 0 or c.replications < 1 or c.seed < 0:
        fail("need sigma_rel >= 0, replications >= 1 and seed >= 0")
    for name, choices in (("generators", GENERATORS), ("signals", SIGNALS), ("profiles", PROFILES)):
        items = tuple(_canon(x, choices, name[:-1]) for x in getattr(c, name))
        if not items or len(set(items)) != len(items):
            fail(f"{name} must be a nonempty list without repeats")
        object.__setattr__(c, name, items)
    try:
        duals = tuple(resolve_dual_name(d) for d in c.duals)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not duals or len(set(duals)) != len(duals):
        fail("duals must be a nonempty list without repeats")
    object.__setattr__(c, "duals", duals)
    if not c.b > 0:
        fail(f"b must be positive, got {c.b}")
    for g in c.generators:
        if c.b > b_bound(g) + 1e-15:
            fail(f"b = {c.b:g} exceeds the admissible bound {b_bound(g):.6g} for {g}")
    if any(d.startswith("phi") for d in duals):
        ratio = 1.0 / (c.b * c.quad_step)
        if abs(ratio - round(ratio)) > 1e-6:
            fail(f"quad_step must divide 1/b for the phi duals (1/(b*step) = {ratio:g})")


def _parse_number(text: str) -> float:
    text = text.strip()
    if text.lower() in ("inf", "+inf"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        return float(Fraction(text))


def _parse_range(text: str, kind=float) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"expected lo:hi, got {text!r}")
    if kind is int:
        return tuple(int(p) for p in parts)
    return tuple(_parse_number(p) for p in parts)


_PARSERS = {
    "a": _parse_number, "b": _parse_number, "quad_step": _parse_number, "p": _parse_number,
    "eps3_shift": _parse_number, "bessel_scale": _parse_number, "tail_tol": _parse_number,
    "cert_tol": _parse_number, "sigma_rel": _parse_number,
    "count": int, "replications": int, "seed": int,
    "m_range": lambda s: _parse_range(s, int), "n_range": lambda s: _parse_range(s, int),
    "map_interval": _parse_range,
    "j_max": lambda s: None if s.strip().lower() in ("auto", "none") else int(s),
    "generators": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
}
_PARSERS["duals"] = _PARSERS["signals"] = _PARSERS["profiles"] = _PARSERS["generators"]


def parse_config(text: str) -> BenchConfig:
    """Read a flat ``key = value`` config, or the JSON manifest of an earlier run."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON config: {exc}") from None
        return BenchConfig.from_dict(data.get("config", data))
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return BenchConfig.from_dict(values)


def format_config(c: BenchConfig) -> str:
    out = []
    for k, v in c.to_dict().items():
        if k in ("m_range", "n_range", "map_interval"):
            v = f"{v[0]!r}:{v[1]!r}"
        elif isinstance(v, list):
            v = ", ".join(v)
        elif v is None:
            v = "auto"
        else:
            v = repr(v)
        out.append(f"{k} = {v}")
    return "\n".join(out) + "\n"


# -- measurement -------------------------------------------------------------------

def amse(original: SampledSignal, reconstructions) -> float:
    """Mean over replications of the per-sample mean squared error."""
    reconstructions = list(reconstructions)
    if not reconstructions:
        raise ValueError("need at least one reconstruction")
    errs = []
    for r in reconstructions:
        if not r.grid.same_as(original.grid):
            raise GridMismatchError("reconstruction grid differs from the original grid")
        errs.append(np.mean((original.values - r.values) ** 2))
    return float(np.mean(errs))


@dataclass(frozen=True)
class CellResult:
    generator: str
    dual: str
    signal: str
    profile: str
    amse: float | None
    duality_residual: float | None
    imag_residual: float | None
    replications: int
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass
class AmseReport:
    config: BenchConfig
    cells: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def keys(self):
        c = self.config
        return [(g, d, s, p) for p in c.profiles for g in c.generators for d in c.duals for s in c.signals]

    @property
    def errored(self) -> list:
        return [cell for cell in self.cells.values() if not cell.ok]

    def table(self, profile: str) -> dict:
        """``(generator, dual, signal) -> AMSE`` for one profile, skipping errored cells."""
        return {(g, d, s): cell.amse for (g, d, s, p), cell in self.cells.items() if p == profile and cell.ok}

    def to_csv(self) -> str:
        lines = ["profile,generator,dual,signal,amse,duality_residual,imag_residual,replications,status,error"]
        for key in self.keys():
            cell = self.cells[key]
            nums = [("" if v is None else repr(v)) for v in (cell.amse, cell.duality_residual, cell.imag_residual)]
            err = cell.error.replace(",", ";").replace("\n", " ")
            lines.append(",".join([cell.profile, cell.generator, cell.dual, cell.signal, *nums,
                                   str(cell.replications), "ok" if cell.ok else "error", err]))
        return "\n".join(lines) + "\n"


def build_generator_duals(name: str, config: BenchConfig):
    """Generator plus requested duals, each with its duality residual or error text.

    ``eps3`` duals are built for the centered window and moved with it, which
    preserves duality for any ``eps3_shift``.
    """
    lattice = config.lattice
    if name == "eps3":
        g = generator_window(name, config.p, 1.5)
        move = config.eps3_shift - 1.5
    else:
        g, move = generator_window(name), 0.0
    opts = dict(bessel_scale=config.bessel_scale, j_max=config.j_max, tail_tol=config.tail_tol)
    results = {}
    for dual in config.duals:
        try:
            h = build_duals(g, [dual], lattice, config.quad_step, **opts)[dual]
            if move:
                h = recenter(h, move)
            results[dual] = (h, None)
        except SplineGaborError as exc:
            results[dual] = (None, f"{type(exc).__name__}: {exc}")
    g = recenter(g, move) if move else g
    out = {}
    for dual, (h, err) in results.items():
        if err is None:
            res = duality_residual(g, h, lattice, config.quad_step)
            if not res < config.cert_tol:
                err = f"duality residual {res:.3g} exceeds cert_tol {config.cert_tol:g}"
            out[dual] = (h, res, err)
        else:
            out[dual] = (None, None, err)
    return g, out


def _run_cell(key, g, dual, residual, config: BenchConfig) -> CellResult:
    gen, dual_name, signal, profile = key
    lattice = config.lattice
    lo, hi = config.map_interval
    f = map_to_interval(make_signal(signal, config.count), lo, hi)
    n0, n1 = config.n_range
    pad_lo = min(lo, n0 * lattice.a + min(g.support[0], dual.support[0]))
    pad_hi = max(hi, n1 * lattice.a + max(g.support[1], dual.support[1]))
    padded, sl = zero_pad(f, pad_lo, pad_hi)

    sigma = config.sigma_rel * rms(f) if profile == "noisy" else 0.0
    reps = config.replications if sigma > 0 else 1
    noise = NoiseConfig(sigma, reps, config.seed)
    recons, imag = [], 0.0
    for r in range(reps):
        noisy = add_noise(padded, noise, r) if sigma > 0 else padded
        out = reconstruct(noisy, g, dual, lattice, config.m_range, config.n_range)
        imag = max(imag, out.imag_residual)
        recons.append(SampledSignal(f.grid, out.values[sl]))
    return CellResult(gen, dual_name, signal, profile, amse(f, recons), residual, imag, reps)


def run_bench(config: BenchConfig, workers: int = 1) -> AmseReport:
    """Fill every configured cell. Output does not depend on ``workers``."""
    report = AmseReport(config)

    def prepare(name):
        return name, build_generator_duals(name, config)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        prepared = dict(pool.map(prepare, config.generators))

    def job(key):
        gen, dual, signal, profile = key
        g, table = prepared[gen]
        h, res, err = table[dual]
        if err is not None:
            return key, CellResult(gen, dual, signal, profile, None, res, None, 0, err)
        try:
            return key, _run_cell(key, g, h, res, config)
        except SplineGaborError as exc:
            return key, CellResult(gen, dual, signal, profile, None, res, None, 0, f"{type(exc).__name__}: {exc}")

    keys = report.keys()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        done = dict(pool.map(job, keys))
    report.cells = {k: done[k] for k in keys}
    report.diagnostics = {
        (gen, dual): {"duality_residual": entry[1], "error": entry[2] or ""}
        for gen, (_, table) in prepared.items() for dual, entry in table.items()
    }
    return report


# -- orderings ---------------------------------------------------------------------

def rank(values: dict, order, tie_tol: float = TIE_TOL) -> list:
    """Group ``name -> value`` into ascending tie groups; ties keep ``order``."""
    pos = {name: i for i, name in enumerate(order)}
    items = sorted(values.items(), key=lambda kv: (kv[1], pos[kv[0]]))
    groups = []
    for name, v in items:
        if groups and abs(v - groups[-1][-1][1]) <= tie_tol:
            groups[-1].append((name, v))
        else:
            groups.append([(name, v)])
    return groups


def format_ranking(groups) -> str:
    return " < ".join(" = ".join(f"{n} ({v:.6g})" for n, v in grp) for grp in groups)


@dataclass
class OrderingSummary:
    dual_rankings: dict
    generator_rankings: dict
    k_optimal: tuple
    eps3_optimal: tuple

    @property
    def k_lowest_holds(self) -> bool:
        hits, total = self.k_optimal
        return total > 0 and hits == total

    @property
    def eps3_lowest_holds(self) -> bool:
        """Read as 'most cells', so a strict majority suffices."""
        hits, total = self.eps3_optimal
        return total > 0 and 2 * hits > total

    def render(self) -> str:
        lines = [
            f"k-optimal: {self.k_optimal[0]}/{self.k_optimal[1]} cells",
            f"eps3-optimal: {self.eps3_optimal[0]}/{self.eps3_optimal[1]} cells",
            f"symmetric dual k lowest everywhere: {'yes' if self.k_lowest_holds else 'no'}",
            f"eps3 lowest among generators in most cells: {'yes' if self.eps3_lowest_holds else 'no'}",
            "duals ranked per (generator, signal):",
        ]
        lines += [f"  {g} {s}: {format_ranking(r)}" for (g, s), r in self.dual_rankings.items()]
        lines.append("generators ranked per (dual, signal):")
        lines += [f"  {d} {s}: {format_ranking(r)}" for (d, s), r in self.generator_rankings.items()]
        return "\n".join(lines) + "\n"


def ordering_analysis(table: dict, generators=GENERATORS, duals=DUAL_ORDER, signals=SIGNALS,
                      tie_tol: float = TIE_TOL) -> OrderingSummary:
    """Rankings over a ``(generator, dual, signal) -> AMSE`` table; missing cells are skipped."""
    dual_rank, gen_rank = {}, {}
    k_hits = k_total = e_hits = e_total = 0
    for g in generators:
        for s in signals:
            vals = {d: table[(g, d, s)] for d in duals if (g, d, s) in table}
            if not vals:
                continue
            groups = dual_rank[(g, s)] = rank(vals, duals, tie_tol)
            if "k" in vals:
                k_total += 1
                k_hits += any(n == "k" for n, _ in groups[0])
    for d in duals:
        for s in signals:
            vals = {g: table[(g, d, s)] for g in generators if (g, d, s) in table}
            if not vals:
                continue
            groups = gen_rank[(d, s)] = rank(vals, generators, tie_tol)
            if "eps3" in vals and len(vals) > 1:
                e_total += 1
                e_hits += any(n == "eps3" for n, _ in groups[0])
    return OrderingSummary(dual_rank, gen_rank, (k_hits, k_total), (e_hits, e_total))


def report_orderings(report: AmseReport) -> str:
    c = report.config
    parts = []
    for profile in c.profiles:
        summary = ordering_analysis(report.table(profile), c.generators, c.duals, c.signals)
        parts.append(f"== profile {profile} ==\n{summary.render()}")
    ref = ordering_analysis(REFERENCE_AMSE, c.generators, c.duals, c.signals)
    parts.append(f"== published table (4 digits, for comparison) ==\n{ref.render()}")
    if report.errored:
        parts.append("errored cells:\n" + "".join(
            f"  {e.profile} {e.generator} {e.dual} {e.signal}: {e.error}\n" for e in report.errored))
    return "\n".join(parts)


def write_report(report: AmseReport, out_dir) -> list:
    """Write ``amse.csv``, ``orderings.txt`` and ``manifest.json``; return the paths."""
    out = Path(out_dir)
    if not out.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {out}")
    csv_path, ord_path, man_path = out / "amse.csv", out / "orderings.txt", out / "manifest.json"
    csv_path.write_text(report.to_csv())
    ord_path.write_text(report_orderings(report))
    manifest = {
        "tool": "splinegabor",
        "version": __version__,
        "command": "bench amse",
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": report.config.to_dict(),
        "tolerances": {"cert_tol": report.config.cert_tol, "tail_tol": report.config.tail_tol,
                       "tie_tol": TIE_TOL, "quad_step": report.config.quad_step},
        "cells": len(report.cells),
        "errored": len(report.errored),
        "outputs": [p.name for p in (csv_path, ord_path, man_path)],
    }
    man_path.write_text(json.dumps(manifest, indent=2, allow_nan=True) + "\n")
    return [csv_path, ord_path, man_path]
