"""Dual windows for Gabor frames generated by spline windows.

Five families are available: the canonical dual ``b g / G``, the symmetric
and asymmetric duals built from integer translates of a partition-of-unity
generator (lattice ``a = 1``), the iteration ``h -> S^-1 g - g + S h``, and the
perturbation family ``g_d + u - sum_{j,k} <g_d, E_jb T_ka g> E_jb T_ka u``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    HypothesisError,
    InvalidBError,
    InvalidCoefficientsError,
    NotADualError,
    NotAFrameError,
    SingularDualError,
    TruncationError,
)
from .gabor import Lattice, _check_pointwise, duality_residual, gram, gram_function
from .grid import QUAD_STEP, Grid
from .windows import PiecewiseWindow, SampledWindow, Window, linear_combination, partition_of_unity_residual

__all__ = [
    "DUAL_ORDER",
    "DualSpec",
    "FrameBounds",
    "NAMED_DUALS",
    "asymmetric_dual",
    "build_duals",
    "canonical_dual",
    "construct_dual",
    "frame_bounds",
    "gram_function",
    "iterated_dual",
    "perturbed_dual",
    "resolve_dual_name",
    "symmetric_dual",
]

FRAME_TOL = 1e-12
COEFF_TOL = 1e-12


@dataclass(frozen=True)
class FrameBounds:
    A: float
    B: float

    def __post_init__(self):
        if not (0 < self.A <= self.B):
            raise ValueError(f"frame bounds need 0 < A <= B, got A={self.A}, B={self.B}")


def frame_bounds(g: Window, a: float, grid: Grid | None = None) -> FrameBounds:
    """Extremes of the Gram function ``G``; ``G`` is ``a``-periodic so one period suffices."""
    if grid is None:
        grid = Grid.from_range(0.0, a, QUAD_STEP)
    G = gram(g, a, grid.points)
    A, B = float(G.min()), float(G.max())
    if A < FRAME_TOL:
        raise NotAFrameError(f"Gram function of {g.label or 'window'} drops to {A:.3g}; translates leave gaps")
    return FrameBounds(A, B)


def canonical_dual(g: Window, lattice: Lattice, step: float = QUAD_STEP) -> SampledWindow:
    """``S^-1 g = b g / G`` sampled on the quadrature grid."""
    if g.length > lattice.period + 1e-12:
        raise HypothesisError(f"support length {g.length:g} exceeds 1/b = {lattice.period:g}")
    frame_bounds(g, lattice.a)
    lo, hi = g.support
    grid = Grid.aligned(lo, hi, step)
    x = grid.points
    gx = g(x)
    G = gram(g, lattice.a, x)
    inside = (x > lo) & (x < hi)
    if np.any(G[inside] < FRAME_TOL):
        raise SingularDualError("Gram function vanishes inside the support")
    values = np.zeros_like(x)
    nz = gx != 0
    values[nz] = lattice.b * gx[nz] / G[nz]
    return SampledWindow(grid, values, (lo, hi), label=f"S^-1 {g.label}",
                         meta={"kind": "canonical", "generator": g.label, "b": lattice.b})


def _generator_order(g: Window, N: int | None) -> int:
    if N is None:
        N = int(round(g.length))
    lo, hi = g.support
    if abs(lo + N / 2) > 1e-12 or abs(hi - N / 2) > 1e-12:
        raise HypothesisError(f"generator support [{lo:g}, {hi:g}] is not [-{N}/2, {N}/2]")
    interior = np.linspace(lo, hi, 2001)[1:-1]
    if np.any(g(interior) <= 0):
        raise HypothesisError("generator must be positive on the interior of its support")
    pou = partition_of_unity_residual(g, Grid.from_range(0.0, 1.0, 1e-3))
    if pou > 1e-10:
        raise HypothesisError(f"generator is not a partition of unity (residual {pou:.3g})")
    return N


def _translate_combination(g: Window, weights: dict, support, label, meta, step) -> Window:
    """``sum_n weights[n] g(x + n)``, exact when ``g`` is piecewise."""
    if isinstance(g, PiecewiseWindow):
        w = linear_combination([(c, g.shifted(n)) for n, c in sorted(weights.items())], label, meta)
        return w
    def fn(x):
        return sum(c * g(x + n) for n, c in sorted(weights.items()))
    return SampledWindow.from_function(fn, support[0], support[1], step, label, meta)


def _symmetric_coeffs(coeffs, N: int, b: float) -> dict:
    if coeffs is None:
        return {n: b for n in range(-N + 1, N)}
    if isinstance(coeffs, dict):
        table = {int(n): float(c) for n, c in coeffs.items()}
    else:
        coeffs = list(coeffs)
        if len(coeffs) != 2 * N - 1:
            raise InvalidCoefficientsError(f"expected {2 * N - 1} coefficients a_(-N+1)..a_(N-1), got {len(coeffs)}")
        table = {n: float(c) for n, c in zip(range(-N + 1, N), coeffs)}
    if set(table) != set(range(-N + 1, N)):
        raise InvalidCoefficientsError(f"coefficients must be indexed by -{N - 1}..{N - 1}")
    if abs(table[0] - b) > COEFF_TOL:
        raise InvalidCoefficientsError(f"a_0 must equal b={b}, got {table[0]}")
    for n in range(1, N):
        if abs(table[n] + table[-n] - 2 * b) > COEFF_TOL:
            raise InvalidCoefficientsError(f"a_{n} + a_-{n} must equal 2b")
    return table


def symmetric_dual(g: Window, b: float, coeffs=None, N: int | None = None,
                   step: float = QUAD_STEP) -> Window:
    """``k(x) = sum_{|n| < N} a_n g(x + n)`` with ``a_0 = b`` and ``a_n + a_-n = 2b``."""
    N = _generator_order(g, N)
    if not 0 < b <= 1.0 / (2 * N - 1) + 1e-15:
        raise InvalidBError(f"b must lie in (0, 1/{2 * N - 1}], got {b}")
    table = _symmetric_coeffs(coeffs, N, b)
    support = (-1.5 * N + 1, 1.5 * N - 1)
    meta = {"kind": "symmetric", "generator": g.label, "b": b, "N": N, "coeffs": table}
    return _translate_combination(g, table, support, f"k[{g.label}]", meta, step)


def asymmetric_dual(g: Window, b: float, N: int | None = None, step: float = QUAD_STEP) -> Window:
    """``h(x) = b g(x) + 2b sum_{n=1}^{N-1} g(x + n)``."""
    N = _generator_order(g, N)
    if not 0 < b <= 1.0 / N + 1e-15:
        raise InvalidBError(f"b must lie in (0, 1/{N}], got {b}")
    weights = {0: b, **{n: 2 * b for n in range(1, N)}}
    support = (-1.5 * N + 1, 0.5 * N)
    meta = {"kind": "asymmetric", "generator": g.label, "b": b, "N": N}
    return _translate_combination(g, weights, support, f"h[{g.label}]", meta, step)


def iterated_dual(g: Window, h: Window, lattice: Lattice, levels: int = 2,
                  step: float = QUAD_STEP, tol: float = 1e-5) -> Window:
    """Apply ``h -> S^-1 g - g + S h`` ``levels - 1`` times; level 1 returns ``h``."""
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if levels == 1:
        return h
    _check_pointwise(g, lattice)
    residual = duality_residual(g, h, lattice, step)
    if residual > tol:
        raise NotADualError(f"{h.label or 'base window'} is not a dual of {g.label} (residual {residual:.3g})")
    canonical = canonical_dual(g, lattice, step)
    cur = h
    for _ in range(levels - 1):
        lo = min(g.support[0], cur.support[0])
        hi = max(g.support[1], cur.support[1])
        grid = Grid.aligned(lo, hi, step)
        x = grid.points
        values = canonical(x) - g(x) + gram(g, lattice.a, x) * cur(x) / lattice.b
        cur = SampledWindow(grid, values, (lo, hi))
    meta = {"kind": "iterated", "generator": g.label, "base": h.label, "levels": levels, "b": lattice.b}
    return cur.with_label(f"{h.label}_{levels}", **meta)


def _overlap(lo1, hi1, lo2, hi2):
    return max(lo1, lo2), min(hi1, hi2)


def interacting_translates(g: Window, g_d: Window, a: float) -> list[int]:
    """Integers ``k`` for which ``supp g_d`` and ``supp g + k a`` overlap on a set of positive length."""
    lo_d, hi_d = g_d.support
    lo, hi = g.support
    k_lo = int(np.floor((lo_d - hi) / a)) - 1
    k_hi = int(np.ceil((hi_d - lo) / a)) + 1
    out = []
    for k in range(k_lo, k_hi + 1):
        ol, oh = _overlap(lo_d, hi_d, lo + k * a, hi + k * a)
        if oh - ol > 1e-12:
            out.append(k)
    return out


def perturbed_dual(g: Window, g_d: Window, lattice: Lattice, bessel_scale: float = 0.1,
                   j_max: int | None = None, step: float = QUAD_STEP,
                   tail_tol: float = 1e-6) -> Window:
    """Real-valued perturbation of a known dual ``g_d`` by ``u = bessel_scale * g``.

    ``phi = g_d + u - sum_k c_k(x) u(x - k a)`` where
    ``c_k(x) = <g_d, T_ka g> + 2 sum_{j=1}^{j_max} (C_jk cos(2 pi j b x) + S_jk sin(2 pi j b x))``
    and ``C_jk``, ``S_jk`` are the cosine/sine moments of ``g_d T_ka g``.
    The moments come from one FFT per translate over a single modulation
    period, which requires ``1/(b * step)`` to be an integer. By default
    ``j_max`` is the highest harmonic that grid resolves.
    """
    if bessel_scale == 0:
        return g_d
    period = lattice.period
    n_period = int(round(period / step))
    if abs(n_period * step - period) > 1e-9 * period:
        raise ValueError(f"quadrature step {step:g} must divide the modulation period 1/b = {period:g}")
    j_resolved = (n_period - 1) // 2
    if j_max is None:
        j_max = j_resolved
    if not 1 <= j_max <= j_resolved:
        raise ValueError(f"j_max must lie in [1, {j_resolved}] at step {step:g}, got {j_max}")
    _check_pointwise(g, lattice)

    a = lattice.a
    K = interacting_translates(g, g_d, a)
    lo_g, hi_g = g.support
    lo = min(g_d.support[0], lo_g, lo_g + min(K) * a)
    hi = max(g_d.support[1], hi_g, hi_g + max(K) * a)
    grid = Grid.aligned(lo, hi, step)
    x = grid.points
    ix = np.rint(x / step).astype(np.int64)
    phi = g_d(x) + bessel_scale * g(x)

    keep = np.zeros(n_period, dtype=bool)
    keep[: j_max + 1] = True
    keep[n_period - j_max:] = True
    # the last ceil(1/b) harmonics, so structural zeros of spline spectra do not hide the tail
    tail_band = np.arange(max(1, j_max - int(np.ceil(period)) + 1), j_max + 1)

    inner, tail = {}, 0.0
    for k in K:
        ol, oh = _overlap(*g_d.support, lo_g + k * a, hi_g + k * a)
        ygrid = Grid.aligned(ol, oh, step)
        y = ygrid.points
        iy0 = int(round(ygrid.origin / step))
        F = g_d(y) * g(y - k * a)
        weights = np.full(y.size, step)
        weights[0] = weights[-1] = 0.5 * step
        folded = np.zeros(n_period)
        np.add.at(folded, np.arange(y.size) % n_period, F * weights)
        spectrum = np.fft.fft(folded)
        inner[k] = float(spectrum[0].real)
        tail = max(tail, float(np.max(np.abs(spectrum[tail_band]))))
        series = n_period * np.fft.ifft(np.where(keep, spectrum, 0.0)).real
        support = (x >= lo_g + k * a) & (x <= hi_g + k * a)
        ck = series[(ix[support] - iy0) % n_period]
        phi[support] -= ck * bessel_scale * g(x[support] - k * a)

    if tail > tail_tol:
        raise TruncationError(
            f"harmonic {j_max} still carries coefficients of size {tail:.3g} > {tail_tol:g}; increase j_max"
        )
    meta = {
        "kind": "perturbed", "generator": g.label, "base": g_d.label, "bessel_scale": bessel_scale,
        "K": K, "j_max": j_max, "tail": tail, "inner_products": inner, "b": lattice.b,
    }
    return SampledWindow(grid, phi, (lo, hi), label=f"phi[{g_d.label}]", meta=meta)


# -- named constructions ------------------------------------------------------

@dataclass(frozen=True)
class DualSpec:
    """Recipe for a dual window; ``base`` feeds the iterated and perturbed kinds."""

    kind: str
    coeffs: tuple | None = None
    base: DualSpec | None = None
    levels: int = 2
    bessel_scale: float = 0.1
    j_max: int | None = None
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.kind not in ("canonical", "symmetric", "asymmetric", "iterated", "perturbed"):
            raise ValueError(f"unknown dual kind {self.kind!r}")
        if self.kind in ("iterated", "perturbed") and self.base is None:
            raise ValueError(f"{self.kind} dual needs a base dual")
        if self.kind == "iterated" and self.levels < 1:
            raise ValueError("iterated dual needs levels >= 1")


_SYM, _ASYM, _CANON = DualSpec("symmetric"), DualSpec("asymmetric"), DualSpec("canonical")

NAMED_DUALS = {
    "Sinv_g": _CANON,
    "h": _ASYM,
    "k": _SYM,
    "h2": DualSpec("iterated", base=_ASYM, levels=2),
    "k2": DualSpec("iterated", base=_SYM, levels=2),
    "phi_h": DualSpec("perturbed", base=_ASYM),
    "phi_k": DualSpec("perturbed", base=_SYM),
    "phi_Sinv_g": DualSpec("perturbed", base=_CANON),
}
#: Row order of the AMSE table.
DUAL_ORDER = tuple(NAMED_DUALS)

_ALIASES = {
    "canonical": "Sinv_g",
    "sym": "k",
    "asym": "h",
    "iter2": "k2",
    "iter2-sym": "k2",
    "iter2-asym": "h2",
    "phi-sym": "phi_k",
    "phi-asym": "phi_h",
    "phi-canonical": "phi_Sinv_g",
}


def resolve_dual_name(name: str) -> str:
    if name in NAMED_DUALS:
        return name
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown dual {name!r}; choose from {sorted(NAMED_DUALS) + sorted(_ALIASES)}") from None


def construct_dual(g: Window, spec: DualSpec, lattice: Lattice, step: float = QUAD_STEP,
                   _cache: dict | None = None) -> Window:
    cache = {} if _cache is None else _cache
    if spec in cache:
        return cache[spec]
    if spec.kind == "canonical":
        w = canonical_dual(g, lattice, step)
    elif spec.kind == "symmetric":
        w = symmetric_dual(g, lattice.b, spec.coeffs, step=step)
    elif spec.kind == "asymmetric":
        w = asymmetric_dual(g, lattice.b, step=step)
    elif spec.kind == "iterated":
        base = construct_dual(g, spec.base, lattice, step, cache)
        w = iterated_dual(g, base, lattice, spec.levels, step)
    else:
        base = construct_dual(g, spec.base, lattice, step, cache)
        w = perturbed_dual(g, base, lattice, spec.bessel_scale, spec.j_max, step, spec.tail_tol)
    cache[spec] = w
    return w


def build_duals(g: Window, names, lattice: Lattice, step: float = QUAD_STEP, *,
                bessel_scale: float = 0.1, j_max: int | None = None, tail_tol: float = 1e-6) -> dict:
    """Construct several named duals, sharing base constructions.

    The keyword arguments override the perturbation settings of the ``phi`` duals.
    """
    cache: dict = {}
    out = {}
    for name in names:
        key = resolve_dual_name(name)
        spec = NAMED_DUALS[key]
        if spec.kind == "perturbed":
            spec = replace(spec, bessel_scale=bessel_scale, j_max=j_max, tail_tol=tail_tol)
        out[key] = construct_dual(g, spec, lattice, step, cache)
    return out
