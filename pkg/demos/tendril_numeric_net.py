"""A coiled tube with no closed-form net: trace one, design, verify and export meshes."""
from pathlib import Path

import numpy as np

from shellgrowth import catalog, design, verify
from shellgrowth.io import atomic_write, grid_mesh, obj_text

entry = catalog.get("pumpkin_tendril")
d = design(entry.reference(), entry.target(), h=entry.h, net_resolution=(96, 96))
print("path", d.path, "net", d.net.kind)

report = verify(d, entry.sample_grid(30, 30))
print(report.table())

out = Path("tendril_out")
theta = np.stack(np.meshgrid(np.linspace(0, 2 * np.pi, 41), np.linspace(0, 8, 81), indexing="ij"), -1)
for label, pts in [("target", d.target(theta)), ("intermediate", d.intermediate.at_theta(theta))]:
    v, f = grid_mesh(pts)
    atomic_write(out / f"{label}.obj", obj_text(v, f))
print("meshes written to", out)
