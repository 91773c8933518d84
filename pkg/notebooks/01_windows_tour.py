"""Tour of the three generator windows.

Run: python notebooks/01_windows_tour.py
"""

import numpy as np

from splinegabor.duals import frame_bounds
from splinegabor.grid import Grid
from splinegabor.windows import generator_window, partition_of_unity_residual

grid = Grid.from_range(0.0, 1.0, 1e-3)
x = np.linspace(-2, 2, 9)

for name in ("B2", "B3", "eps3"):
    g = generator_window(name)
    fb = frame_bounds(g, 1.0)
    print(f"{name:5s} support {g.support}  PU residual {partition_of_unity_residual(g, grid):.1e}"
          f"  frame bounds A={fb.A:.4f} B={fb.B:.4f}")
    print("      samples", np.round(g(x), 4))

# The exponential spline stays a partition of unity for every rate.
for p in (0.5, 1.0, 2.0, 3.0):
    g = generator_window("eps3", p=p)
    print(f"eps3 p={p}: peak {g(0.0):.6f}, PU residual {partition_of_unity_residual(g, grid):.1e}")
