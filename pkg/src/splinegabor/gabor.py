"""Gabor analysis, synthesis, frame operator and the duality certifier.

Inner products use the composite trapezoid rule on the signal's own grid.
All sums run in a fixed order so results do not depend on threading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmallError, PointwiseFormError, UnsupportedLatticeError
from .grid import QUAD_STEP, Grid, SampledSignal, trapezoid_weights
from .windows import Window, lattice_sum

_M_CHUNK = 64


@dataclass(frozen=True)
class Lattice:
    a: float = 1.0
    b: float = 0.2

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"lattice steps must be positive, got a={self.a}, b={self.b}")

    @property
    def period(self) -> float:
        """Modulation period ``1/b``."""
        return 1.0 / self.b


def _index_range(r) -> np.ndarray:
    lo, hi = int(r[0]), int(r[1])
    if hi < lo:
        raise ValueError(f"empty index range {r}")
    return np.arange(lo, hi + 1)


@dataclass(frozen=True)
class GaborCoefficients:
    """``c[m, n] = <f, E_{mb} T_{na} g>`` over inclusive index ranges."""

    m_range: tuple
    n_range: tuple
    values: np.ndarray

    def __post_init__(self):
        shape = (len(self.ms), len(self.ns))
        if np.shape(self.values) != shape:
            raise ValueError(f"coefficient array must have shape {shape}")

    @property
    def ms(self):
        return _index_range(self.m_range)

    @property
    def ns(self):
        return _index_range(self.n_range)

    def __getitem__(self, mn):
        m, n = mn
        return self.values[m - self.m_range[0], n - self.n_range[0]]


class TimeFrequencyShift:
    """``x -> exp(2 pi i m b x) w(x - n a)``."""

    def __init__(self, w: Window, m: int, n: int, lattice: Lattice):
        self.window, self.m, self.n, self.lattice = w, m, n, lattice
        lo, hi = w.support
        shift = n * lattice.a
        self.support = (lo + shift, hi + shift)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        shift = self.n * self.lattice.a
        values = self.window(x - shift)
        if self.m == 0:
            return values.astype(complex)
        return np.exp(2j * np.pi * self.m * self.lattice.b * x) * values


def modulate_translate(w: Window, m: int, n: int, lattice: Lattice) -> TimeFrequencyShift:
    return TimeFrequencyShift(w, m, n, lattice)


def gram(g: Window, a: float, x) -> np.ndarray:
    """``G(x) = sum_n |g(x - n a)|^2``."""
    return lattice_sum(g, x, a, power=2)


def gram_function(g: Window, a: float, grid: Grid) -> SampledSignal:
    return SampledSignal(grid, gram(g, a, grid.points), label=f"G[{g.label}]")


def _support_slice(x: np.ndarray, lo: float, hi: float) -> slice:
    i0 = int(np.searchsorted(x, lo, side="left"))
    i1 = int(np.searchsorted(x, hi, side="right"))
    return slice(i0, i1)


def analysis(f: SampledSignal, g: Window, lattice: Lattice, m_range, n_range) -> GaborCoefficients:
    """Trapezoid-rule Gabor coefficients of ``f`` against ``g``."""
    ms, ns = _index_range(m_range), _index_range(n_range)
    x = f.t
    tol = 1e-9 * max(1.0, f.grid.step)
    lo, hi = g.support
    for n in (ns[0], ns[-1]):
        if lo + n * lattice.a < x[0] - tol or hi + n * lattice.a > x[-1] + tol:
            raise GridTooSmallError(
                f"signal grid [{x[0]:g}, {x[-1]:g}] does not cover the support "
                f"[{lo + n * lattice.a:g}, {hi + n * lattice.a:g}] of translate n={n}"
            )
    fw = f.values * trapezoid_weights(f.grid)
    out = np.zeros((len(ms), len(ns)), dtype=complex)
    for j, n in enumerate(ns):
        shift = n * lattice.a
        sl = _support_slice(x, lo + shift, hi + shift)
        xs = x[sl]
        v = fw[sl] * g(xs - shift)
        for k0 in range(0, len(ms), _M_CHUNK):
            mm = ms[k0:k0 + _M_CHUNK]
            phase = np.exp(-2j * np.pi * lattice.b * np.outer(mm, xs))
            out[k0:k0 + len(mm), j] = (phase * v).sum(axis=1)
    return GaborCoefficients((int(ms[0]), int(ms[-1])), (int(ns[0]), int(ns[-1])), out)


def synthesis(c: GaborCoefficients, g: Window, lattice: Lattice, grid: Grid) -> SampledSignal:
    """``sum_{m,n} c[m,n] E_{mb} T_{na} g`` on ``grid``; keeps the real part."""
    x = grid.points
    total = np.zeros(grid.count, dtype=complex)
    lo, hi = g.support
    ms = c.ms
    for j, n in enumerate(c.ns):
        shift = n * lattice.a
        sl = _support_slice(x, lo + shift, hi + shift)
        xs = x[sl]
        if xs.size == 0:
            continue
        acc = np.zeros(xs.size, dtype=complex)
        for k0 in range(0, len(ms), _M_CHUNK):
            mm = ms[k0:k0 + _M_CHUNK]
            phase = np.exp(2j * np.pi * lattice.b * np.outer(mm, xs))
            acc += (c.values[k0:k0 + len(mm), j, None] * phase).sum(axis=0)
        total[sl] += acc * g(xs - shift)
    imag = float(np.max(np.abs(total.imag))) if total.size else 0.0
    return SampledSignal(grid, total.real, imag_residual=imag)


def _check_pointwise(g: Window, lattice: Lattice) -> None:
    if g.length > lattice.period + 1e-12:
        raise PointwiseFormError(
            f"support of {g.label or 'window'} has length {g.length:g} > 1/b = {lattice.period:g}; "
            "the frame operator is not a pointwise multiplier"
        )


def frame_operator_apply(f: SampledSignal, g: Window, lattice: Lattice) -> SampledSignal:
    """``S f = G f / b``, valid when ``supp g`` fits in an interval of length ``1/b``."""
    _check_pointwise(g, lattice)
    values = gram(g, lattice.a, f.t) * f.values / lattice.b
    return SampledSignal(f.grid, values, label=f"S[{f.label}]")


def required_n_max(g: Window, h: Window, lattice: Lattice) -> int:
    return int(np.ceil(lattice.b * (g.length + h.length) - 1e-12))


def duality_residual(g: Window, h: Window, lattice: Lattice, step: float = QUAD_STEP,
                     n_max: int | None = None) -> float:
    """Worst violation of ``sum_m g(x - n/b + m) h(x + m) = b delta_{n,0}`` on ``[0, 1]``.

    Only the integer-translation lattice ``a = 1`` is supported.
    """
    if abs(lattice.a - 1.0) > 1e-12:
        raise UnsupportedLatticeError(f"duality condition is implemented for a = 1, got a = {lattice.a}")
    need = required_n_max(g, h, lattice)
    if n_max is None:
        n_max = need
    elif n_max < need:
        raise ValueError(f"n_max={n_max} is too small to see every overlap; need >= {need}")
    x = Grid.from_range(0.0, 1.0, step).points
    lo, hi = h.support
    m_values = range(int(np.floor(lo)) - 1, int(np.ceil(hi)) + 1)
    h_shifted = {m: h(x + m) for m in m_values}
    worst = 0.0
    for n in range(-n_max, n_max + 1):
        total = np.zeros_like(x)
        for m, hv in h_shifted.items():
            total += g(x - n * lattice.period + m) * hv
        target = lattice.b if n == 0 else 0.0
        worst = max(worst, float(np.max(np.abs(total - target))))
    return worst


def reconstruct(f: SampledSignal, g: Window, dual: Window, lattice: Lattice, m_range, n_range,
                flipped: bool = False) -> SampledSignal:
    """Truncated expansion of ``f``.

    By default coefficients are taken against ``dual`` and synthesized with
    ``g``; ``flipped=True`` swaps the two roles.
    """
    analyzer, synthesizer = (g, dual) if flipped else (dual, g)
    c = analysis(f, analyzer, lattice, m_range, n_range)
    return synthesis(c, synthesizer, lattice, f.grid)
