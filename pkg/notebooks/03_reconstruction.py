"""Analysis and synthesis of a test signal, with error against the number of modulations.

Run: python notebooks/03_reconstruction.py
"""

import numpy as np

from splinegabor.duals import build_duals
from splinegabor.gabor import Lattice, reconstruct
from splinegabor.signals import make_signal, map_to_interval, zero_pad
from splinegabor.windows import generator_window

lattice = Lattice(1.0, 0.2)
g = generator_window("B3")
k = build_duals(g, ["k"], lattice)["k"]

f = map_to_interval(make_signal("Heavisine", 2048), -3, 3)
padded, core = zero_pad(f, -8, 8)

for M in (3, 10, 50, 200):
    out = reconstruct(padded, g, k, lattice, (-M, M), (-4, 4))
    mse = np.mean((out.values[core] - f.values) ** 2)
    print(f"M={M:4d}  MSE {mse:.3e}  imag residual {out.imag_residual:.1e}")
