"""The invariant suite run by ``holderexp verify``.

Each check returns a :class:`CheckResult`.  Checks whose accuracy depends on
a user-tunable resolution are marked ``sensitive``; when such a check misses
its tolerance at a resolution below the defaults it is reported as
``inconclusive`` rather than ``fail``.
"""

import time
from dataclasses import dataclass, asdict

import numpy as np

from . import sharp
from .bounds import CircleScan, beta, beta0, ps_isotropic_bound, unitdet_bound
from .circle import Cone, cone_arc_measure, level_set_measure
from .field import AngularPiecewise, Disk
from .wirtinger import (WeightPair, best_constant, bound_prelimCab,
                        random_piecewise_weights)

DEFAULT_ANGLES = 4096
DEFAULT_GRID = 2048


@dataclass
class SuiteConfig:
    fast: bool = False
    angles: int = DEFAULT_ANGLES
    n_grid: int = DEFAULT_GRID
    seed: int = 0

    @property
    def degraded(self):
        return self.angles < DEFAULT_ANGLES or self.n_grid < DEFAULT_GRID

    def as_dict(self):
        return asdict(self)


@dataclass
class CheckResult:
    name: str
    measured: float
    tolerance: float
    status: str
    seconds: float = 0.0
    detail: str = ""

    @property
    def margin(self):
        return self.tolerance - self.measured


def _result(name, measured, tolerance, config, sensitive=False, detail=""):
    measured = float(measured)
    if measured <= tolerance:
        status = "pass"
    elif sensitive and config.degraded:
        status = "inconclusive"
    else:
        status = "fail"
    return CheckResult(name, measured, tolerance, status, detail=detail)


def admissible_pairs(rng=None):
    """(tau, M) in {0, .25, .5, .75, 1} x {1.05, 1.2, 2} inside the certified range."""
    rng = rng or sharp.find_admissible_range()
    return [(t, M) for t in (0.0, 0.25, 0.5, 0.75, 1.0) for M in (1.05, 1.2, 2.0)
            if rng.admits(t, M)]


def check_sharp_closed_form(config):
    pairs = admissible_pairs()
    if config.fast:
        pairs = pairs[::4]
    n_c, n_r = (9, 4) if config.fast else (33, 12)
    worst = 0.0
    for tau, M in pairs:
        field = sharp.sharp_field(sharp.make_params(tau, M))
        b = beta(field, CircleScan.lattice(field.domain, n_c, n_r),
                 min_nodes=config.angles)
        worst = max(worst, abs(b.value - sharp.exponent(tau, M)))
    return _result("sharp_closed_form", worst, 1e-6, config, True,
                   f"{len(pairs)} pairs, {n_c} centres x {n_r} radii")


def check_endpoints(config):
    scan_args = (9, 4) if config.fast else (17, 6)
    worst = 0.0
    field = sharp.sharp_field(sharp.make_params(1.0, 1.2))
    scan = CircleScan.lattice(field.domain, *scan_args)
    b = beta(field, scan, min_nodes=config.angles)
    worst = max(worst, abs(b.value - unitdet_bound(field, scan, min_nodes=config.angles)),
                float(np.max(np.abs(b.table.det_ratio - 1.0))))
    for M in (2.0, 4.0, 9.0, 100.0):
        field = sharp.sharp_field(sharp.make_params(0.0, M))
        b = beta(field, CircleScan.lattice(field.domain, *scan_args),
                 min_nodes=config.angles)
        worst = max(worst, abs(b.value - ps_isotropic_bound(M)))
    return _result("endpoint_reductions", worst, 1e-8, config, True)


def check_f_estimate(config):
    params = sharp.make_params(1.0, 1.2)
    n = 11 if config.fast else 41
    _, vals = sharp.f_scan(sharp.sharp_field(params), 3.0, n)
    return _result("f_estimate", np.nanmax(vals) - params.c, 1e-9, config, True,
                   f"tau=1, M=1.2, {n}x{n} grid")


def check_euclid(config):
    rng = np.random.default_rng(config.seed)
    n = 10 if config.fast else 100
    worst = 0.0
    for _ in range(n):
        phi1 = rng.uniform(0, np.pi)
        cone = Cone(phi1, phi1 + rng.uniform(0.05, np.pi - 0.05))
        ref = cone_arc_measure(cone, (0.0, 0.0), 1.0)
        r = np.sqrt(rng.uniform(0, 1, n)) * 0.999
        a = rng.uniform(0, 2 * np.pi, n)
        for x in np.column_stack((r * np.cos(a), r * np.sin(a))):
            worst = max(worst, abs(cone_arc_measure(cone, x, 1.0) - ref))
    return _result("euclid_cone", worst, 1e-10, config, False, f"{n} cones x {n} centres")


def check_level_set(config):
    rng = np.random.default_rng(config.seed + 1)
    n = 5 if config.fast else 20
    worst = 0.0
    for d in np.linspace(1.0, 10.0, n):
        a = rng.uniform(0, 2 * np.pi)
        x = (d * np.cos(a), d * np.sin(a))
        for k in rng.uniform(0, 1, n):
            got = level_set_measure(x, k, n_angles=config.angles)
            worst = max(worst, abs(got - 4 * np.arcsin(np.sqrt(k))))
    return _result("level_set_law", worst, 1e-6, config, True, f"n_angles={config.angles}")


def check_wirtinger(config):
    one = best_constant(WeightPair.constant(), config.n_grid).C
    results = [_result("wirtinger_constant_weights", abs(one - 1.0), 1e-5, config, True,
                       f"n_grid={config.n_grid}")]
    rng = np.random.default_rng(config.seed + 2)
    n = 20 if config.fast else 200
    worst = -np.inf
    for _ in range(n):
        w = random_piecewise_weights(rng)
        worst = max(worst, best_constant(w, config.n_grid).C - bound_prelimCab(w))
    results.append(_result("wirtinger_bound", worst, 1e-6, config, True,
                           f"{n} random weight pairs"))
    return results


def check_spectral(config):
    pairs = admissible_pairs()
    if config.fast:
        pairs = pairs[::4]
    g_err = f_err = 0.0
    for tau, M in pairs:
        p = sharp.make_params(tau, M)
        mode = sharp.sturm_liouville_smallest(sharp.sharp_weights(p), n_grid=config.n_grid)
        g_err = max(g_err, abs(mode.gamma - p.exponent))
        err, sol = sharp.eigenfunction_match(p, config.n_grid)
        f_err = max(f_err, err)
        g_err = max(g_err, abs(sol.gamma - p.exponent))
    return [_result("spectral_gamma", g_err, 1e-4, config, True, f"{len(pairs)} pairs"),
            _result("spectral_eigenfunction", f_err, 1e-3, config, True)]


def check_explicit_solution(config):
    jumps = resid = 0.0
    for tau, M in admissible_pairs() + [(0.0, 9.0), (1.0, 1.0)]:
        p = sharp.make_params(tau, M)
        rep = sharp.interface_checks(p)
        jumps = max(jumps, rep.value_jump, rep.flux_jump, rep.ode_residual)
        resid = max(resid, sharp.weak_residual(sharp.profile_mode(p), sharp.sharp_weights(p)),
                    sharp.weak_residual_2d(p))
    return [_result("interface_continuity", jumps, 1e-10, config),
            _result("weak_residual", resid, 1e-8, config)]


def check_zeta(config):
    rng_ = sharp.find_admissible_range()
    deltas = np.linspace(0, rng_.delta0, 1001)[1:-1]
    min_zeta = float(np.min(sharp.zeta(rng_.epsilon0, deltas)))
    rng = np.random.default_rng(config.seed + 3)
    n = 1000 if config.fast else 10000
    disagree = 0
    for _ in range(n):
        m = rng.uniform(1.0 + 1e-6, 3.0)
        eps = rng.uniform(0.0, min(1.0, m))
        lhs, rhs, z = sharp.mcond_equivalence_check(eps, m)
        if abs(rhs - lhs) > 1e-12 and (lhs <= rhs) != (z >= 0):
            disagree += 1
    return [_result("zeta_origin", abs(sharp.zeta(0.0, 0.0)), 4 * np.finfo(float).eps,
                    config),
            _result("zeta_positive_below_delta0", -min_zeta, 0.0, config, False,
                    f"eps0={rng_.epsilon0:.6g}, delta0={rng_.delta0:.6g}"),
            _result("mcond_sign_agreement", disagree, 0, config, False, f"{n} samples")]


def random_angular_field(rng, n_arcs=(2, 6), value_range=(0.25, 4.0)):
    """Angular field with random arcs, random diagonal values and random
    rotation flag."""
    n = int(rng.integers(n_arcs[0], n_arcs[1] + 1))
    starts = np.sort(np.concatenate(([0.0], rng.uniform(0.1, 2 * np.pi - 0.1, n - 1))))
    lo, hi = np.log(value_range[0]), np.log(value_range[1])
    k1 = np.exp(rng.uniform(lo, hi, n))
    k2 = np.exp(rng.uniform(lo, hi, n))
    return AngularPiecewise(starts, k1, k2, rotate=bool(rng.integers(0, 2)), domain=Disk())


def check_ordering(config):
    rng = np.random.default_rng(config.seed + 4)
    n = 5 if config.fast else 50
    worst = -np.inf
    for _ in range(n):
        field = random_angular_field(rng)
        scan = CircleScan.lattice(field.domain, 5, 2)
        b = beta(field, scan, min_nodes=config.angles).value
        b0 = beta0(field, scan, n_grid=config.n_grid)
        # equality holds on circles where det A is constant; allow the
        # solver's own error estimate there
        worst = max(worst, b - b0.value - b0.error_estimate)
    results = [_result("beta_le_beta0", worst, 0.0, config, True,
                       f"{n} random fields, slack = solver error estimate")]
    p = sharp.make_params(1.0, 1.2)
    slope = sharp.empirical_holder_exponent(sharp.sharp_solution(p),
                                            (1e-4, 1e-3, 1e-2, 1e-1, 1.0))
    results.append(_result("holder_fit", abs(slope - p.exponent), 1e-2, config))
    decay = sharp.energy_decay(p)
    results.append(_result("energy_decay_constant", decay.relative_spread, 1e-6, config))
    return results


CHECKS = (check_sharp_closed_form, check_endpoints, check_f_estimate, check_euclid,
          check_level_set, check_wirtinger, check_spectral, check_explicit_solution,
          check_zeta, check_ordering)


def run_suite(config=None, checks=CHECKS):
    config = config or SuiteConfig()
    out = []
    for check in checks:
        start = time.perf_counter()
        res = check(config)
        res = res if isinstance(res, list) else [res]
        elapsed = (time.perf_counter() - start) / len(res)
        for r in res:
            r.seconds = elapsed
        out.extend(res)
    return out

