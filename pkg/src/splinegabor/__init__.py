"""Gabor frames with compactly supported spline windows and their dual windows."""

__version__ = "0.1.0"

from .bench import AmseReport, BenchConfig, amse, ordering_analysis, parse_config, run_bench
from .duals import (
    DUAL_ORDER,
    asymmetric_dual,
    build_duals,
    canonical_dual,
    frame_bounds,
    iterated_dual,
    perturbed_dual,
    symmetric_dual,
)
from .gabor import Lattice, analysis, duality_residual, frame_operator_apply, reconstruct, synthesis
from .grid import QUAD_STEP, Grid, SampledSignal
from .signals import SIGNALS, NoiseConfig, add_noise, make_signal, map_to_interval
from .windows import (
    GENERATORS,
    ExpSplineParams,
    bspline_window,
    eval_bspline,
    eval_exp_bspline_general,
    eval_exp_bspline_raw,
    generator_window,
    normalize_exp_bspline,
)

__all__ = [name for name in dir() if not name.startswith("_")]
