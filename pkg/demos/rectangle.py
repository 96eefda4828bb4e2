"""Rectangle crossings: the discrete modulus matches b * a**(1 - p) at every
resolution.  For p > 1 the extremal metric is the constant 1/a; at p = 1 it
is not unique and the simplex returns a vertex (one column of cells)."""

import time

import numpy as np

from modulus_lab import Grid, SolveOptions, rectangle_family, solve
from modulus_lab.oracles import rectangle_modulus_exact

a, b = 1.0, 2.0
for p in (1.0, 2.0, 3.0):
    print(f"p = {p:g}, exact {rectangle_modulus_exact(a, b, p):g}")
    for nx in (8, 16, 32, 64):
        g = Grid(a, b, nx, 2 * nx)
        t0 = time.perf_counter()
        rep = solve(rectangle_family(g, "Gamma0"), g.space, p, SolveOptions())
        spread = np.ptp(rep.metric.values)
        print(f"  {nx:3d}x{2 * nx:<4d} value {rep.value:.15f}  metric spread {spread:.1e}  "
              f"{time.perf_counter() - t0:.3f}s")
