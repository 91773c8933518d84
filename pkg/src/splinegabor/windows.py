"""Compactly supported windows: B-splines and exponential B-splines.

Closed-form windows are stored as piecewise sums of terms
``c * t**k * exp(r * t)`` where ``t`` is measured from the left knot of each
segment. That single representation covers polynomial B-splines, exponential
B-splines and any linear combination of their integer translates, which is
what the symmetric and asymmetric dual constructions produce.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import DegenerateRatesError, InvalidOrderError, InvalidParameterError
from .grid import QUAD_STEP, Grid

KNOT_TOL = 1e-12
#: Rates closer than this are rejected by the explicit exponential formula.
RATE_SEPARATION = 1e-8


def _as_array(x):
    x = np.asarray(x, dtype=float)
    return x, x.ndim == 0


class Window:
    """Real-valued function with compact support ``[lo, hi]``."""

    def __init__(self, support, label="", meta=None):
        lo, hi = float(support[0]), float(support[1])
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
            raise ValueError(f"invalid support [{lo}, {hi}]")
        self.support = (lo, hi)
        self.label = label
        self.meta = dict(meta or {})

    @property
    def length(self) -> float:
        return self.support[1] - self.support[0]

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        x, scalar = _as_array(x)
        y = self._evaluate(np.atleast_1d(x)).reshape(x.shape)
        return float(y) if scalar else y

    def sample(self, step: float = QUAD_STEP) -> SampledWindow:
        return SampledWindow.from_function(
            self, self.support[0], self.support[1], step, label=self.label, meta=self.meta
        )

    def with_label(self, label: str, **meta) -> Window:
        raise NotImplementedError

    def __repr__(self):
        lo, hi = self.support
        return f"{type(self).__name__}({self.label!r}, support=[{lo:g}, {hi:g}])"


# -- piecewise exp-poly segments ------------------------------------------------

def _eval_terms(terms: dict, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for (rate, power), coef in terms.items():
        term = coef * t**power if power else np.full_like(t, coef)
        if rate:
            term = term * np.exp(rate * t)
        out += term
    return out


def _rebase(terms: dict, d: float) -> dict:
    """Re-express terms in ``t' = t - d`` (segment origin moved right by d)."""
    if d == 0:
        return dict(terms)
    out: dict = {}
    for (rate, power), coef in terms.items():
        scale = coef * (np.exp(rate * d) if rate else 1.0)
        for q in range(power + 1):
            key = (rate, q)
            out[key] = out.get(key, 0.0) + scale * comb(power, q) * d ** (power - q)
    return out


def _add_terms(acc: dict, terms: dict, scale: float) -> None:
    for key, coef in terms.items():
        acc[key] = acc.get(key, 0.0) + scale * coef


class PiecewiseWindow(Window):
    """Exact piecewise window on knots ``k_0 < ... < k_P``.

    Segment ``i`` covers ``[k_i, k_{i+1})`` so evaluation at an interior knot
    uses the segment to its right.
    """

    def __init__(self, knots, pieces, label="", meta=None):
        knots = np.asarray(knots, dtype=float)
        if len(knots) != len(pieces) + 1 or len(pieces) == 0:
            raise ValueError("need one more knot than pieces")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        super().__init__((knots[0], knots[-1]), label, meta)
        self.knots = knots
        self.pieces = tuple({k: float(v) for k, v in p.items() if v != 0} for p in pieces)

    def _evaluate(self, x):
        idx = np.searchsorted(self.knots, x, side="right") - 1
        out = np.zeros_like(x)
        for i, terms in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = _eval_terms(terms, x[mask] - self.knots[i])
        return out

    @property
    def is_polynomial(self) -> bool:
        return all(rate == 0 for p in self.pieces for rate, _ in p)

    def knot_jumps(self) -> np.ndarray:
        """|left limit - right value| at every interior knot."""
        jumps = []
        for i in range(1, len(self.pieces)):
            width = self.knots[i] - self.knots[i - 1]
            left = _eval_terms(self.pieces[i - 1], np.array([width]))[0]
            right = _eval_terms(self.pieces[i], np.array([0.0]))[0]
            jumps.append(abs(left - right))
        return np.array(jumps)

    def shifted(self, shift: float) -> PiecewiseWindow:
        """The window ``x -> self(x + shift)``."""
        return PiecewiseWindow(self.knots - shift, self.pieces, self.label, self.meta)

    def scaled(self, factor: float) -> PiecewiseWindow:
        pieces = [{k: factor * c for k, c in p.items()} for p in self.pieces]
        return PiecewiseWindow(self.knots, pieces, self.label, self.meta)

    def with_label(self, label, **meta):
        return PiecewiseWindow(self.knots, self.pieces, label, {**self.meta, **meta})


def linear_combination(terms, label="", meta=None) -> PiecewiseWindow:
    """Exact ``sum c_i * w_i`` for piecewise windows ``w_i``."""
    terms = [(float(c), w) for c, w in terms if c != 0]
    if not terms:
        raise ValueError("linear combination of nothing")
    knots = np.unique(np.concatenate([w.knots for _, w in terms]))
    # merge knots that differ only by roundoff
    keep = np.concatenate([[True], np.diff(knots) > KNOT_TOL])
    knots = knots[keep]
    pieces = []
    for left in knots[:-1]:
        acc: dict = {}
        for c, w in terms:
            if not (w.knots[0] - KNOT_TOL <= left < w.knots[-1] - KNOT_TOL):
                continue
            i = int(np.searchsorted(w.knots, left + KNOT_TOL, side="right")) - 1
            _add_terms(acc, _rebase(w.pieces[i], left - w.knots[i]), c)
        pieces.append(acc)
    return PiecewiseWindow(knots, pieces, label, meta)


# -- sampled windows ----------------------------------------------------------

class SampledWindow(Window):
    """Window tabulated on a uniform grid, linearly interpolated between nodes."""

    def __init__(self, grid: Grid, values, support=None, label="", meta=None):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.count,):
            raise ValueError("values do not match grid")
        super().__init__(support or (grid.origin, grid.end), label, meta)
        self.grid = grid
        self.values = values
        self._nodes = grid.points

    @classmethod
    def from_function(cls, fn, lo, hi, step=QUAD_STEP, label="", meta=None):
        grid = Grid.aligned(lo, hi, step)
        x = grid.points
        values = np.where((x >= lo) & (x <= hi), fn(x), 0.0)
        return cls(grid, values, (lo, hi), label, meta)

    def _evaluate(self, x):
        lo, hi = self.support
        y = np.interp(x, self._nodes, self.values, left=0.0, right=0.0)
        y[(x < lo) | (x > hi)] = 0.0
        return y

    def sample(self, step=QUAD_STEP):
        if abs(step - self.grid.step) < 1e-15:
            return self
        return super().sample(step)

    def shifted(self, shift: float) -> SampledWindow:
        grid = Grid(self.grid.origin - shift, self.grid.step, self.grid.count)
        lo, hi = self.support
        return SampledWindow(grid, self.values, (lo - shift, hi - shift), self.label, self.meta)

    def with_label(self, label, **meta):
        return SampledWindow(self.grid, self.values, self.support, label, {**self.meta, **meta})


# -- B-splines ----------------------------------------------------------------

# Closed forms in global x, ascending powers, on knots -N/2, ..., N/2.
_BSPLINE_CLOSED = {
    1: [(1.0,)],
    2: [(1.0, 1.0), (1.0, -1.0)],
    3: [(9 / 8, 3 / 2, 1 / 2), (3 / 4, 0.0, -1.0), (9 / 8, -3 / 2, 1 / 2)],
}


def _poly_terms(coeffs) -> dict:
    return {(0.0, k): float(c) for k, c in enumerate(coeffs) if c != 0}


def _bspline_knots(order: int) -> np.ndarray:
    return np.arange(order + 1) - order / 2


def bspline_by_convolution(order: int) -> list[list[Fraction]]:
    """Local-coordinate polynomial pieces of B_N from ``B_{N+1} = B_N * B_1``.

    Exact rational arithmetic; piece ``i`` lives on ``[-N/2 + i, -N/2 + i + 1)``.
    """
    if order < 1:
        raise InvalidOrderError(f"B-spline order must be >= 1, got {order}")
    pieces = [[Fraction(1)]]
    for _ in range(order - 1):
        # antiderivatives P_j(t) = int_0^t p_j and their totals I_j = P_j(1)
        anti = [[Fraction(0)] + [c / (k + 1) for k, c in enumerate(p)] for p in pieces]
        totals = [sum(a) for a in anti]
        n = len(pieces)
        new = []
        for i in range(n + 1):
            cur = anti[i] if i < n else [Fraction(0)]
            prev = anti[i - 1] if i > 0 else [Fraction(0)]
            width = max(len(cur), len(prev))
            coeffs = [
                (cur[k] if k < len(cur) else 0) - (prev[k] if k < len(prev) else 0)
                for k in range(width)
            ]
            coeffs[0] += totals[i - 1] if i > 0 else 0
            new.append(coeffs)
        pieces = new
    return pieces


def bspline_window(order: int) -> PiecewiseWindow:
    """Centered B-spline ``B_N`` supported on ``[-N/2, N/2]``."""
    if order < 1:
        raise InvalidOrderError(f"B-spline order must be >= 1, got {order}")
    knots = _bspline_knots(order)
    if order in _BSPLINE_CLOSED:
        pieces = [_rebase(_poly_terms(c), left) for c, left in zip(_BSPLINE_CLOSED[order], knots)]
    else:
        pieces = [_poly_terms([float(c) for c in p]) for p in bspline_by_convolution(order)]
    return PiecewiseWindow(knots, pieces, label=f"B{order}", meta={"order": order})


def eval_bspline(order: int, x):
    return bspline_window(order)(x)


# -- exponential B-splines ----------------------------------------------------

@dataclass(frozen=True)
class ExpSplineParams:
    """Rates ``a_1 < ... < a_N`` of an exponential B-spline.

    ``p`` is set when the parameters come from the symmetric shortcut
    ``(-p, 0, p)``.
    """

    rates: tuple
    p: float | None = None

    def __post_init__(self):
        rates = tuple(float(a) for a in self.rates)
        object.__setattr__(self, "rates", rates)
        if len(rates) < 1:
            raise InvalidParameterError("need at least one rate")
        if not any(rates):
            raise InvalidParameterError("at least one rate must be nonzero")
        diffs = np.diff(rates)
        if np.any(np.abs(diffs) < RATE_SEPARATION):
            raise DegenerateRatesError(f"rates must be pairwise distinct: {rates}")
        if np.any(diffs < 0):
            raise InvalidParameterError(f"rates must be strictly increasing: {rates}")

    @classmethod
    def symmetric(cls, p: float) -> ExpSplineParams:
        if not p > 0:
            raise InvalidParameterError(f"p must be positive, got {p}")
        return cls((-p, 0.0, p), p=float(p))

    @property
    def order(self) -> int:
        return len(self.rates)


def exp_bspline_general_window(params: ExpSplineParams) -> PiecewiseWindow:
    """Unnormalized exponential B-spline on ``[0, N]`` from the explicit formula.

    On ``[k-1, k]`` the coefficient of ``exp(a_i (x - k + 1))`` is
    ``(-1)**(k-1) * prod_{j != i} 1/(a_i - a_j) * sum_S exp(sum_{j in S} a_j)``
    with ``S`` running over the (k-1)-subsets of indices other than ``i``.
    """
    a = params.rates
    n = len(a)
    if n < 2:
        raise InvalidOrderError("the explicit formula needs order >= 2")
    base = [np.prod([1.0 / (a[i] - a[j]) for j in range(n) if j != i]) for i in range(n)]
    pieces = []
    for k in range(1, n + 1):
        terms = {}
        for i in range(n):
            others = [j for j in range(n) if j != i]
            weight = sum(
                np.exp(sum(a[j] for j in subset))
                for subset in itertools.combinations(others, k - 1)
            )
            terms[(a[i], 0)] = (-1) ** (k - 1) * base[i] * weight
        pieces.append(terms)
    return PiecewiseWindow(np.arange(n + 1.0), pieces, label=f"eps{n}'", meta={"rates": a})


def eval_exp_bspline_general(params: ExpSplineParams, x):
    return exp_bspline_general_window(params)(x)


def exp_bspline_raw_window(p: float) -> PiecewiseWindow:
    """Order-3 exponential B-spline with rates ``(0, p, -p)``, unnormalized."""
    if not p > 0:
        raise InvalidParameterError(f"p must be positive, got {p}")
    ep, em, q = np.exp(p), np.exp(-p), 1.0 / (2 * p * p)
    pieces = [
        {(p, 0): q, (-p, 0): q, (0.0, 0): -2 * q},
        {(0.0, 0): 2 * q * (ep + em), (p, 0): -q * (1 + em), (-p, 0): -q * (1 + ep)},
        {(0.0, 0): -2 * q, (p, 0): q * em, (-p, 0): q * ep},
    ]
    return PiecewiseWindow([0.0, 1.0, 2.0, 3.0], pieces, label="eps3'", meta={"p": p})


def eval_exp_bspline_raw(p: float, x):
    return exp_bspline_raw_window(p)(x)


def partition_scale(p: float) -> float:
    """Factor turning the raw order-3 spline into a partition of unity."""
    return p * p * np.exp(p) / np.expm1(p) ** 2


def normalize_exp_bspline(p: float) -> PiecewiseWindow:
    w = exp_bspline_raw_window(p).scaled(partition_scale(p))
    return w.with_label("eps3", p=p, order=3)


# -- helpers --------------------------------------------------------------------

def recenter(w: Window, shift: float) -> Window:
    """The window ``x -> w(x + shift)``."""
    if shift == 0:
        return w
    moved = w.shifted(shift)
    label = f"{w.label}(x{shift:+g})" if w.label else ""
    return moved.with_label(label, recenter_shift=w.meta.get("recenter_shift", 0.0) + shift)


def lattice_sum(w: Window, x, a: float = 1.0, power: int = 1) -> np.ndarray:
    """``sum_n w(x - n a)**power``; finite because the support is compact."""
    x = np.asarray(x, dtype=float)
    lo, hi = w.support
    n_lo = int(np.floor((x.min() - hi) / a)) - 1
    n_hi = int(np.ceil((x.max() - lo) / a)) + 1
    total = np.zeros_like(x)
    for n in range(n_lo, n_hi + 1):
        v = w(x - n * a)
        total += v if power == 1 else v**power
    return total


def partition_of_unity_residual(w: Window, grid: Grid) -> float:
    return float(np.max(np.abs(lattice_sum(w, grid.points) - 1.0)))


GENERATORS = ("B2", "B3", "eps3")


def generator_window(name: str, p: float = 1.0, eps3_shift: float = 1.5) -> PiecewiseWindow:
    """Gabor generator by name.

    B-splines sit on ``[-N/2, N/2]``. ``eps3`` is ``x -> eps3(x + eps3_shift)``,
    so the default shift centers it and ``eps3_shift=0`` keeps it on ``[0, 3]``.
    """
    key = name.lower()
    if key == "b2":
        return bspline_window(2)
    if key == "b3":
        return bspline_window(3)
    if key == "eps3":
        return recenter(normalize_exp_bspline(p), eps3_shift)
    raise ValueError(f"unknown generator {name!r}; choose from {GENERATORS}")
