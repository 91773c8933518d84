"""The five Donoho-Johnstone test signals and the noise model for replicated runs.

Formulas follow WaveLab's ``MakeSignal`` except Quadchirp, whose phase is
quadratic in ``t`` (WaveLab uses ``t**3``). Samples sit at ``t_i = i/(count-1)``,
so both endpoints of ``[0, 1]`` are included.

=========  ==================================================================
Blocks     sum_j h_j * H(t - t_j), H the unit step (H(0) = 1)
Bumps      sum_j h_j * (1 + |t - t_j| / w_j)**-4
Heavisine  4 sin(4 pi t) - sgn(t - 0.3) - sgn(0.72 - t)
Doppler    sqrt(t (1 - t)) sin(2 pi (1 + eps) / (t + eps)), eps = 0.05
Quadchirp  sin(pi / 3 * count * t**2)
=========  ==================================================================
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, SampledSignal

SIGNALS = ("Blocks", "Bumps", "Heavisine", "Doppler", "Quadchirp")

JUMP_LOCATIONS = np.array([0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81])
BLOCKS_HEIGHTS = np.array([4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])
BUMPS_HEIGHTS = np.array([4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
BUMPS_WIDTHS = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])
DOPPLER_EPS = 0.05


def _canonical_kind(kind: str) -> str:
    for name in SIGNALS:
        if name.lower() == kind.lower():
            return name
    raise ValueError(f"unknown signal {kind!r}; choose from {SIGNALS}")


def signal_values(kind: str, t: np.ndarray, count: int | None = None) -> np.ndarray:
    """Evaluate a test signal at arbitrary ``t``; ``count`` only matters for Quadchirp."""
    kind = _canonical_kind(kind)
    t = np.asarray(t, dtype=float)
    if kind == "Blocks":
        return np.heaviside(t[:, None] - JUMP_LOCATIONS, 1.0) @ BLOCKS_HEIGHTS
    if kind == "Bumps":
        return (1.0 + np.abs((t[:, None] - JUMP_LOCATIONS) / BUMPS_WIDTHS)) ** -4 @ BUMPS_HEIGHTS
    if kind == "Heavisine":
        return 4 * np.sin(4 * np.pi * t) - np.sign(t - 0.3) - np.sign(0.72 - t)
    if kind == "Doppler":
        eps = DOPPLER_EPS
        return np.sqrt(t * (1 - t)) * np.sin(2 * np.pi * (1 + eps) / (t + eps))
    n = len(t) if count is None else count
    return np.sin(np.pi / 3 * n * t**2)


def make_signal(kind: str, count: int = 2048) -> SampledSignal:
    if count < 2:
        raise ValueError(f"need at least 2 samples, got {count}")
    kind = _canonical_kind(kind)
    grid = Grid(0.0, 1.0 / (count - 1), count)
    return SampledSignal(grid, signal_values(kind, grid.points, count), label=kind)


def map_to_interval(f: SampledSignal, lo: float, hi: float) -> SampledSignal:
    """Affinely move the sample positions onto ``[lo, hi]``; values are untouched."""
    if not hi > lo:
        raise ValueError(f"target interval must satisfy hi > lo, got [{lo}, {hi}]")
    grid = Grid(float(lo), (hi - lo) / (f.grid.count - 1), f.grid.count)
    return SampledSignal(grid, f.values, f.imag_residual, f.label)


def zero_pad(f: SampledSignal, lo: float, hi: float) -> tuple[SampledSignal, slice]:
    """Extend ``f`` by zeros at the same step so the grid covers ``[lo, hi]``.

    Returns the padded signal and the slice locating the original samples.
    """
    step = f.grid.step
    before = max(0, int(np.ceil((f.grid.origin - lo) / step - 1e-9)))
    after = max(0, int(np.ceil((hi - f.grid.end) / step - 1e-9)))
    values = np.concatenate([np.zeros(before), f.values, np.zeros(after)])
    grid = Grid(f.grid.origin - before * step, step, values.size)
    return SampledSignal(grid, values, label=f.label), slice(before, before + f.grid.count)


@dataclass(frozen=True)
class NoiseConfig:
    sigma: float = 0.0
    replications: int = 1
    seed: int = 42

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def noise_rng(seed: int, replication_index: int) -> np.random.Generator:
    """Stream that depends only on ``(seed, replication_index)``."""
    return np.random.default_rng(np.random.SeedSequence([seed, replication_index]))


def add_noise(f: SampledSignal, noise: NoiseConfig, replication_index: int) -> SampledSignal:
    if not 0 <= replication_index < noise.replications:
        raise ValueError(f"replication index {replication_index} outside [0, {noise.replications})")
    if noise.sigma == 0:
        return f
    draws = noise_rng(noise.seed, replication_index).standard_normal(f.grid.count)
    return SampledSignal(f.grid, f.values + noise.sigma * draws, label=f.label)


def rms(f: SampledSignal) -> float:
    return float(np.sqrt(np.mean(f.values**2)))
