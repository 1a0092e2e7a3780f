"""How the stress residual responds to a mis-specified stretch."""
import numpy as np

from shellgrowth import catalog, design, verify

entry = catalog.get("morning_glory")
d = design(entry.reference(), entry.target(), h=entry.h)
theta = entry.sample_grid(20, 20)

for eps in [0.0, 1e-6, 1e-4, 1e-2]:
    r = verify(d, theta, perturb=eps).residuals
    print(f"eps={eps:<7g} r_S0={r['S0']:.3e}  r_det={r['det']:.3e}  r_C0={r['C0']:.3e}")
# r_S0 and r_det grow linearly in eps; the unperturbed field sits at rounding level
