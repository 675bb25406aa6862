"""For a quadratic Hamiltonian the Herman-Kluk propagator is exact.

After one full period of the unit harmonic oscillator every state comes
back with a sign flip, psi(2 pi) = -psi(0). The sign is carried entirely
by the prefactor, whose square root has to be followed continuously
through one full turn of det Z = 2 exp(-it).
"""

import numpy as np

from hkprop import WidthPair, builtin, coherent_state, integrate_trajectory, l2_error, propagate_hk
from hkprop.hk_symbol import hk_prefactor_closed

model = builtin("harmonic")
eps = 0.05
box = (-4.0, 4.0, 1025)
a = coherent_state((1.0, 0.0), eps, box=box)
b = coherent_state((-0.5, 0.5), eps, box=box)
psi = a.with_values((a.values + b.values) / np.sqrt(2))

for widths in (WidthPair.identity(1), WidthPair.from_values(2.0, 0.5)):
    out = propagate_hk(model, psi, 2 * np.pi, widths=widths)
    err = l2_error(out, psi.with_values(-psi.values))
    print(f"widths {widths.theta_x.entries[0, 0].real:.1f}/{widths.theta_y.entries[0, 0].real:.1f}: "
          f"|HK(2 pi) psi + psi| = {err:.2e}")

for t in (0.0, np.pi, 2 * np.pi, 3 * np.pi, 4 * np.pi):
    r = integrate_trajectory(model, [1.0], [0.0], t, 1e-3)
    u = hk_prefactor_closed(r, WidthPair.identity(1)).u0[-1]
    print(f"t = {t / np.pi:.0f} pi: u0 = {u:+.6f}")
