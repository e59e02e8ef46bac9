import numpy as np

from holderexp.wirtinger import (WeightPair, best_constant, bound_prelimCab,
                                 random_piecewise_weights)

# Unit weights: the classical constant is 1, eigenfunctions cos and sin.
sol = best_constant(WeightPair.constant(), 2048)
print("C(1,1) =", sol.C, " multiplicity", sol.multiplicity)

# Richardson extrapolation of the second-order scheme.  The coarse and fine
# values differ by roughly four times the remaining error.
w = WeightPair.piecewise_constant([0.0, 1.0, 3.5], [1.0, 3.0, 0.4], [2.0, 0.5, 1.0])
for n in (128, 256, 512, 1024):
    s = best_constant(w, n)
    print(n, s.C_coarse, s.C_fine, s.C, s.error_estimate)

# The constant never exceeds the closed-form bound built from sup/inf of ab
# and the averages of a and 1/b.
rng = np.random.default_rng(1)
gaps = []
for _ in range(50):
    w = random_piecewise_weights(rng)
    gaps.append(bound_prelimCab(w) - best_constant(w, 1024).C)
print("min(bound - C) over 50 random pairs:", min(gaps))
