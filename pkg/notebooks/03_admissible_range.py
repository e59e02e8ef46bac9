import numpy as np

from holderexp import sharp

# zeta(eps, delta) > 0 certifies that the centred unit circle maximises the
# circle average.  Peak in eps at delta=0, then the largest delta that keeps
# it positive.
r = sharp.find_admissible_range()
print("eps0 =", r.epsilon0, " delta0 =", r.delta0, " m0 =", r.m0)
for tau in (0.25, 0.5, 0.75, 1.0):
    print(f"M_max({tau}) = {r.M_max(tau):.4f}")

eps = np.linspace(0, 1, 11)
print(np.round(sharp.zeta(eps, 0.0), 5))

# The certificate is conservative: a grid search for the first contrast where
# an off-centre circle wins finds a larger threshold.
print("critical M at tau=1 (21x21 grid):", sharp.critical_contrast(1.0, n=21, tol=1e-3))
