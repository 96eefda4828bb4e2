"""Scaled atomic rows recover any positive metric, and unit-mass intervals
turn a metric along a line into curves of length exactly 1."""

import numpy as np

from modulus_lab import (CellSpace, Grid, Metric, SolveOptions, gamma_phi_system, integrate,
                         p_energy, rasterize_polyline, solve, unit_mass_intervals)
from modulus_lab.geometry import interval_polyline

rng = np.random.default_rng(3)
space = CellSpace(rng.uniform(0.5, 2.0, 8))
phi = Metric(rng.uniform(0.2, 3.0, 8))
for p in (1.0, 2.0, 3.0):
    rep = solve(gamma_phi_system(space, phi), space, p, SolveOptions())
    print(f"p = {p:g}: value {rep.value:.12f} energy {p_energy(phi, space, p):.12f}  "
          f"max metric error {np.abs(rep.metric.values - phi.values).max():.1e}")

g = Grid(1.0, 2.0, 8, 16)
const = Metric.constant(g.n_cells, 1.0)
samples = np.ones(1025)
for n in (1, 2, 4):
    ivs = unit_mass_intervals(samples, 1 / 1024, n)
    iv = ivs[len(ivs) // 2]
    row = rasterize_polyline(g, interval_polyline([0.0, g.row_center_y(3)], [1.0, 0.0], iv, n))
    print(f"n = {n}: {len(ivs)} intervals, middle one [{iv.left:.4f}, {iv.right:.4f}] mass "
          f"{iv.mass:.6f}; traversed {n}x it integrates to {integrate(const, row):.12f}")
