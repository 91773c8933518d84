"""Uniform sampling grids and sampled signals."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Default quadrature / sampling step. A power of two keeps integer and
#: half-integer knots exactly on the grid.
QUAD_STEP = 1.0 / 8192


@dataclass(frozen=True)
class Grid:
    origin: float
    step: float
    count: int

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.count}")

    @classmethod
    def from_range(cls, lo: float, hi: float, step: float) -> Grid:
        """Grid starting at `lo` with nodes up to and including `hi` when reachable."""
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return cls(float(lo), float(step), max(count, 2))

    @classmethod
    def aligned(cls, lo: float, hi: float, step: float = QUAD_STEP) -> Grid:
        """Grid whose nodes are integer multiples of `step`, covering [lo, hi]."""
        i0 = int(np.floor(lo / step + 1e-9))
        i1 = int(np.ceil(hi / step - 1e-9))
        return cls(i0 * step, step, max(i1 - i0 + 1, 2))

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @property
    def end(self) -> float:
        return self.origin + self.step * (self.count - 1)

    def same_as(self, other: Grid, tol: float = 1e-12) -> bool:
        return (
            self.count == other.count
            and abs(self.origin - other.origin) <= tol
            and abs(self.step - other.step) <= tol * max(1.0, self.step)
        )


@dataclass(frozen=True)
class SampledSignal:
    """Real samples on a uniform grid.

    `imag_residual` records the largest discarded imaginary part when the
    samples come from a complex synthesis; it is zero otherwise.
    """

    grid: Grid
    values: np.ndarray
    imag_residual: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.count,):
            raise ValueError(
                f"expected {self.grid.count} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def t(self) -> np.ndarray:
        return self.grid.points

    def __len__(self):
        return self.grid.count


def trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.count, grid.step)
    w[0] = w[-1] = 0.5 * grid.step
    return w
