"""Crossings with a doubled excursion at the start.

Every row is longer than 1 under phi = 1/a, so phi shrinks and the modulus
of the family falls below b/a.  It approaches b/a only as the excursions
shrink; truncating a row at phi-length 1 drops the excursion entirely.
"""

from modulus_lab import Grid, Metric, SolveOptions, integrate, rectangle_family, solve
from modulus_lab.geometry import Curve, Polyline, curve_integral, truncate_to_unit

g = Grid(1.0, 2.0, 16, 16)
phi = Metric.constant(g.n_cells, 1.0)
star = rectangle_family(g, "GammaStar")
print("shortest row under phi = 1:", min(integrate(phi, r) for r in star))

for s in (1, 10, 100, 1e4, 1e7):
    rep = solve(rectangle_family(g, "GammaStar", prefix_scale=s), g.space, 2.0, SolveOptions())
    print(f"excursion scale 1/{s:<8g} Mod = {rep.value:.9f}")

# one curve: the crossing first, then the excursion; cut at unit length
y = g.row_center_y(5)
c = Curve([Polyline([[0, y], [1, y]]), Polyline([[0, y], [1 / 6, y]], 2)])
print("full length", curve_integral(g, c, phi), "-> truncated",
      curve_integral(g, truncate_to_unit(c, phi, g), phi))
