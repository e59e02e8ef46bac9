import numpy as np

from holderexp import sharp
from holderexp.bounds import CircleScan, beta, ps_isotropic_bound

# The sharp family interpolates between an isotropic two-phase field (tau=0)
# and a unit-determinant one (tau=1).  Closed-form exponent first.
for tau in (0.0, 0.25, 0.5, 0.75, 1.0):
    p = sharp.make_params(tau, 1.2)
    print(f"tau={tau:4}  mu={p.mu:.6f}  c={p.c:.6f}  mu/c={p.exponent:.6f}")

# at tau=0 the closed form is the isotropic arctan bound
print(sharp.exponent(0.0, 9.0), ps_isotropic_bound(9.0))

# Scan circles: the minimum over circles lands on the closed form when M is
# inside the certified range.
p = sharp.make_params(0.5, 1.2)
field = sharp.sharp_field(p)
b = beta(field, CircleScan.lattice(field.domain, 17, 6))
print("beta =", b.value, " closed form =", p.exponent, " circle =", b.circle)

# The explicit solution r^(mu/c) w(theta) has an oscillation that decays
# with that exponent.
u = sharp.sharp_solution(p)
print("fitted exponent:", sharp.empirical_holder_exponent(u, np.geomspace(1e-4, 1, 5)))

# The profile glues trig pieces across the sector edges.  Value and flux
# jumps are at roundoff level.
print(sharp.interface_checks(p))

# Outside the certified range an off-centre circle wins.  M=2 at tau=1:
p2 = sharp.make_params(1.0, 2.0)
x, excess = sharp.first_exceeding_center(p2, 3.0, 21)
print("worst centre", x, "f - c =", excess)
v = sharp.verify_sharpness(1.0, 2.0, sharp.Resolution.fast())
for s in v.stages:
    print(f"  {s.name:16s} {s.status:13s} {s.value:.6f} (target {s.expected:.6f})")
