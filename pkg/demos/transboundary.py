"""Holes collapsed to atoms.

Without holes the transboundary space is the plain grid.  Giving a hole an
atom entry in the rows that pass through it can only lower the modulus, and
each solve still comes with a verified certificate.
"""

import numpy as np

from modulus_lab import (Grid, Measure, MeasureSystem, SolveOptions, TransboundaryDomain,
                         build_certificate, solve, verify_certificate)
from modulus_lab.geometry import Polyline, staircase_crossings, transboundary_family

g = Grid(2.0, 1.0, 8, 4)
curves = [Polyline([[0, g.row_center_y(iy)], [2, g.row_center_y(iy)]]) for iy in range(4)]
curves += staircase_crossings(g, 6, seed=1)
opts = SolveOptions()

for holes in ((), (frozenset({10, 11}),), (frozenset({10, 11}), frozenset({21}))):
    dom = TransboundaryDomain(g, holes)
    with_atoms = transboundary_family(dom, curves)
    keep = lambda mu: mu.indices < dom.n_free
    stripped = MeasureSystem(tuple(Measure(mu.indices[keep(mu)], mu.values[keep(mu)])
                                   for mu in with_atoms))
    r1 = solve(with_atoms, dom.space, 2.0, opts)
    r0 = solve(stripped, dom.space, 2.0, opts)
    ok = verify_certificate(build_certificate(with_atoms, dom.space, r1), with_atoms, dom.space,
                            r1.metric, opts=opts).verdict
    print(f"{len(holes)} holes: Mod with atoms {r1.value:.10f}, without {r0.value:.10f}, "
          f"certificate {'verified' if ok else 'FAILED'}")
    if holes:
        print("  atom values", np.round(r1.metric.values[dom.n_free:], 6).tolist())
