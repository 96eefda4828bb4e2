"""The half-crossing family certifies phi = 1/a for the full crossings.

Each half-crossing, traversed twice, has phi-length exactly 1 and the cone
condition holds with equal weights, so phi is extremal for the union as well.
"""

from modulus_lab import Grid, Metric, SolveOptions, fit_certificate, rectangle_family, solve
from modulus_lab import verify_certificate

g = Grid(1.0, 2.0, 8, 16)
opts = SolveOptions()
gamma0 = rectangle_family(g, "Gamma0")
gamma1 = rectangle_family(g, "Gamma1")
phi = Metric.constant(g.n_cells, 1.0)

cert = fit_certificate(list(gamma1), phi, g.space, 2.0)
ver = verify_certificate(cert, gamma0, g.space, phi, opts=opts)
print(ver.summary())
print()
print("Mod(Gamma0)           ", solve(gamma0, g.space, 2.0, opts).value)
print("Mod(Gamma0 u Gamma1)  ", solve(gamma0 | gamma1, g.space, 2.0, opts).value)

# a metric that is admissible but not extremal is rejected, with a reason
psi = Metric(phi.values * 1.1)
bad = verify_certificate(fit_certificate(list(gamma1), psi, g.space, 2.0), gamma0, g.space, psi,
                         opts=opts)
print()
print("scaled metric:", "accepted" if bad.verdict else f"rejected ({', '.join(bad.failed)})")
