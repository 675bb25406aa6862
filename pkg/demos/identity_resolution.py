"""Coherent-state resolution of the identity.

Analyse a wavepacket on a phase-space grid, put every coefficient back on
its own Gaussian and compare with the input. The reconstruction error is
pure quadrature error, so it collapses once the grid spacing drops below
about sqrt(eps).
"""

import numpy as np

from hkprop import WidthPair, coherent_state, l2_error
from hkprop.fio import auto_grid, identity_apply

eps = 0.01
psi = coherent_state((0.2, 0.5), eps, box=(-2.0, 2.0, 1025))

print("phase-space spacing / sqrt(eps)   nodes   relative L2 error")
for spacing in (4.0, 2.0, 1.0, 0.75, 0.5):
    grid = auto_grid(psi, spacing=spacing)
    out = identity_apply(psi, WidthPair.identity(1), grid)
    print(f"{spacing:>30.2f} {len(grid):>7d} {l2_error(out, psi) / psi.norm():>18.2e}")

# the same holds for unequal and complex widths once the symbol is det(Tx + Ty)^(1/2)
for widths in (WidthPair.from_values(2.0, 0.5), WidthPair.from_values(1 + 0.5j, 0.7 - 0.2j)):
    out = identity_apply(psi, widths, auto_grid(psi))
    tx, ty = widths.theta_x.entries[0, 0], widths.theta_y.entries[0, 0]
    print(f"Tx = {tx:.2f}, Ty = {ty:.2f}: error {l2_error(out, psi):.2e}")
