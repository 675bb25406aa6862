"""Herman-Kluk, frozen and thawed Gaussians on an anharmonic potential.

A coherent state in V(x) = 1 - cos x is propagated to t = 1 for a sweep of
eps and compared with a converged split-step solution. The Herman-Kluk
error halves with eps, the frozen Gaussian with constant symbol does not
improve at all, and the thawed Gaussian sits in between.

Runs in about two minutes on one core.
"""

import numpy as np

from hkprop.experiments import halving_ratios, loglog_slope, run_compare

table = run_compare({
    "potential": "torsional",
    "eps": [0.2, 0.1, 0.05, 0.025],
    "t_final": 1.0,
    "q0": 1.0,
    "p0": 0.0,
    "methods": ["hk", "fga", "tga"],
})

print(f"{'method':>6} " + " ".join(f"eps={e:<7g}" for e in (0.025, 0.05, 0.1, 0.2)) + "  slope")
for method in ("hk", "fga", "tga"):
    eps, err = table.errors(method)
    print(f"{method:>6} " + " ".join(f"{e:<11.2e}" for e in err) + f"  {loglog_slope(eps, err):.2f}")
    print(" " * 7 + "halving ratios " + ", ".join(f"{r:.2f}" for r in halving_ratios(eps, err)))
