"""Hoelder-exponent lower bounds for 2D divergence-form elliptic equations."""

from .exceptions import *  # noqa: F401,F403
from .field import (AngularPiecewise, Disk, GridSampled, Rect, SharpFamily, SymMat2,
                    ellipticity_bounds, eval_field, identity_field)
from .circle import Circle, Cone, cone_arc_measure, f_average, level_set_measure
from .wirtinger import (WeightPair, best_constant, bound_prelimCab,
                        sturm_liouville_smallest, weak_residual)
from .bounds import (CircleScan, beta, beta0, compute_bounds, ps_general_bound,
                     ps_isotropic_bound, unitdet_bound)
from .sharp import (find_admissible_range, make_params, u_tau, verify_sharpness, w_tau,
                    zeta)

__version__ = "0.1.0"
