"""Plot data for the test-signal and dual-window figures: one CSV per curve plus a legend."""

from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np

from .duals import build_duals
from .gabor import Lattice
from .grid import QUAD_STEP, Grid
from .signals import SIGNALS, make_signal
from .windows import generator_window

FIGURES = ("test-signals", "b2-duals", "b3-duals", "eps3-duals")

# curve file stem, dual key (None for the generator), legend text
_DUAL_CURVES = (
    ("generator", None, "generator {g}"),
    ("k", "k", "symmetric dual k"),
    ("h", "h", "asymmetric dual h"),
    ("canonical", "Sinv_g", "canonical dual S^-1 {g}"),
    ("phi_k", "phi_k", "perturbed dual phi_k"),
    ("phi_h", "phi_h", "perturbed dual phi_h"),
    ("phi_canonical", "phi_Sinv_g", "perturbed dual phi_S^-1 {g}"),
)


def _csv(x, y, header) -> str:
    rows = "\n".join(f"{a!r},{b!r}" for a, b in zip(x.tolist(), y.tolist()))
    return f"{header}\n{rows}\n"


def figure_curves(figure: str, step: float = 1 / 256, p: float = 1.0, quad_step: float = QUAD_STEP):
    """``[(file name, legend text, csv text)]`` for one figure."""
    if figure == "test-signals":
        out = []
        for kind in SIGNALS:
            f = make_signal(kind, 2048)
            out.append((f"{kind.lower()}.csv", f"{kind} sampled at 2048 points on [0, 1]", _csv(f.t, f.values, "t,value")))
        return out
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {FIGURES}")
    name = {"b2-duals": "B2", "b3-duals": "B3", "eps3-duals": "eps3"}[figure]
    g = generator_window(name, p)
    duals = build_duals(g, [d for _, d, _ in _DUAL_CURVES if d], Lattice(1.0, 0.2), quad_step)
    lo = min(w.support[0] for w in duals.values())
    hi = max(w.support[1] for w in duals.values())
    x = Grid.aligned(lo - 0.5, hi + 0.5, step).points
    out = []
    for stem, key, legend in _DUAL_CURVES:
        w = g if key is None else duals[key]
        out.append((f"{stem}.csv", legend.format(g=name), _csv(x, np.asarray(w(x), dtype=float), "x,value")))
    return out


def plot_emit(figure: str, out_dir, **kw) -> list:
    """Write the curves of ``figure`` and ``legend.txt`` into ``out_dir``.

    The directory must already exist. Files are staged in a temporary
    directory first, so a failure leaves nothing behind.
    """
    out = Path(out_dir)
    if not out.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {out}")
    curves = figure_curves(figure, **kw)
    legend = "".join(f"{fname}\t{text}\n" for fname, text, _ in curves)
    written = []
    with tempfile.TemporaryDirectory(dir=out) as tmp:
        staged = []
        for fname, _, body in curves:
            (Path(tmp) / fname).write_text(body)
            staged.append(fname)
        (Path(tmp) / "legend.txt").write_text(legend)
        staged.append("legend.txt")
        for fname in staged:
            target = out / fname
            (Path(tmp) / fname).replace(target)
            written.append(target)
    return written
