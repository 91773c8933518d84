"""Build every dual window for each generator and certify it.

Run: python notebooks/02_dual_windows.py
"""

from splinegabor.duals import DUAL_ORDER, build_duals
from splinegabor.gabor import Lattice, duality_residual
from splinegabor.windows import GENERATORS, generator_window

lattice = Lattice(1.0, 0.2)

print(f"{'':6s}" + "".join(f"{d:>12s}" for d in DUAL_ORDER))
for name in GENERATORS:
    g = generator_window(name)
    duals = build_duals(g, DUAL_ORDER, lattice)
    print(f"{name:6s}" + "".join(f"{duality_residual(g, duals[d], lattice):12.1e}" for d in DUAL_ORDER))

# Perturbed duals keep track of which translates of g they touch and how much series tail was dropped.
phi = build_duals(generator_window("B3"), ["phi_k"], lattice)["phi_k"]
print("B3 phi_k:", {k: phi.meta[k] for k in ("K", "j_max", "tail")})
