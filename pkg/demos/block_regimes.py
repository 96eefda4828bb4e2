"""One measure restricted to a block of mass 4, across p.

For p >= 1 the value is 4**(1 - p).  At p = 1 the extremal metric is not
unique; two pivot orders land on different vertices.  Below p = 1 only
atoms keep an extremal metric: all weight goes to the lightest atom.
"""

from modulus_lab import SolveOptions, eval_atomic_modulus_sub1, solve, solve_modulus_l1
from modulus_lab.oracles import atom_system, block_system, block_modulus

space, system = block_system(4.0, 4)
opts = SolveOptions()
for p in (1.0, 1.5, 2.0, 3.0):
    rep = solve(system, space, p, opts)
    print(f"p = {p:<4g} value {rep.value:.12g}  expected {block_modulus(p, 4.0).value:g}  "
          f"metric {rep.metric.values.round(6).tolist()}")

for order in ("bland", "reverse"):
    rep = solve_modulus_l1(system, space, opts, pivot_order=order)
    print(f"p = 1, {order:7s} pivots: metric {rep.metric.values.tolist()}")

aspace, asys = atom_system([0.25, 1.0, 3.0])
res = eval_atomic_modulus_sub1(asys, aspace, 0.5)
print(f"atoms (0.25, 1, 3), p = 0.5: value {res.value}, metric {res.metric.values.tolist()}")
print("divisible mass, p = 0.5:", block_modulus(0.5, 4.0, divisible=True))
