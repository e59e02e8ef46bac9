"""Command-line front end.

    holderexp bounds    --field F [--centers N --radii K --angles A]
    holderexp wirtinger --weights W [--n N]
    holderexp sharp     --tau T --M V
    holderexp verify    [--fast]

Every subcommand accepts ``--format text|json|csv`` and ``--out PATH``.
Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .bounds import CircleScan, compute_bounds
from .exceptions import HolderError, ParseError, PreconditionError
from .parsers import read_field, read_weights
from .sharp import Resolution, make_params, verify_sharpness, w_tau
from .suite import DEFAULT_ANGLES, DEFAULT_GRID, SuiteConfig, run_suite
from .wirtinger import best_constant, bound_prelimCab

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _at_least(minimum):
    def convert(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value
    return convert


# --------------------------------------------------------------------------
# output

def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def _flatten(data, prefix=""):
    """Nested dicts to ``a.b = value`` pairs in insertion order; lists of dicts
    are indexed."""
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for i, item in enumerate(value):
                yield from _flatten(item, f"{name}.{i}.")
        else:
            yield name, value


def _plain(value):
    """JSON-safe copy with numpy scalars and non-finite floats converted."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if np.isfinite(v) else str(v)
    return value


def render(data, fmt, rows=None, header=None):
    """Text block, JSON document, or CSV of ``rows``."""
    if fmt == "json":
        return json.dumps(_plain(data), indent=2) + "\n"
    if fmt == "csv":
        if rows is None:
            raise UsageError("this subcommand has no CSV table")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in _flatten(data))


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands

def cmd_bounds(args):
    field = read_field(args.field)
    scan = CircleScan.lattice(field.domain, args.centers, args.radii)
    beta0_scan = CircleScan.lattice(field.domain, args.beta0_centers, args.beta0_radii)
    report, table = compute_bounds(field, scan, with_beta0=not args.no_beta0,
                                   beta0_scan=beta0_scan, n_grid=args.n,
                                   min_nodes=args.angles)
    data = {"config": {"subcommand": "bounds", "field": args.field,
                       "centers": args.centers, "radii": args.radii,
                       "angles": args.angles, "beta0_centers": args.beta0_centers,
                       "beta0_radii": args.beta0_radii, "n": args.n,
                       "beta0": not args.no_beta0},
            "field": field.describe()}
    data.update(report.to_dict())
    rows = list(table.rows())
    return data, rows, ["x", "y", "rho", "f", "det_ratio", "circle_bound"], EXIT_OK


def cmd_wirtinger(args):
    weights = read_weights(args.weights)
    sol = best_constant(weights, args.n)
    bound = bound_prelimCab(weights)
    # C <= bound is a theorem; allow the solver's own error estimate
    ok = sol.C <= bound + max(sol.error_estimate, 1e-12 * bound)
    data = {"config": {"subcommand": "wirtinger", "weights": args.weights, "n": args.n},
            "C": sol.C, "bound": bound, "gamma": sol.gamma,
            "multiplicity": sol.multiplicity, "bound_holds": bool(ok),
            "convergence": {"n_coarse": sol.n_coarse, "C_coarse": sol.C_coarse,
                            "n_fine": sol.n_fine, "C_fine": sol.C_fine,
                            "C_extrapolated": sol.C,
                            "error_estimate": sol.error_estimate}}
    rows = list(zip(sol.theta, sol.w))
    return data, rows, ["theta", "w"], EXIT_OK if ok else EXIT_FAIL


def cmd_sharp(args):
    try:
        params = make_params(args.tau, args.M)
    except PreconditionError as err:
        raise UsageError(str(err)) from err
    res = Resolution.fast() if args.fast else Resolution()
    verdict = verify_sharpness(params.tau, params.M, res)
    d = verdict.to_dict()
    data = {"config": {"subcommand": "sharp", "tau": args.tau, "M": args.M,
                       "fast": args.fast, "samples": args.samples}}
    for key in ("tau", "M", "mu", "c", "exponent", "m", "m0", "M_max", "admissible",
                "passed"):
        data[key] = d[key]
    data["stages"] = {s["name"]: {k: s[k] for k in ("status", "value", "expected",
                                                   "error", "tolerance", "detail")}
                      for s in d["stages"]}
    theta = np.linspace(0.0, 2 * np.pi, args.samples, endpoint=False)
    rows = list(zip(theta, w_tau(params, theta)))
    return data, rows, ["theta", "w"], EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_verify(args):
    config = SuiteConfig(fast=args.fast, angles=args.angles, n_grid=args.n, seed=args.seed)
    results = run_suite(config)
    failed = any(r.status == "fail" for r in results)
    data = {"config": dict(config.as_dict(), subcommand="verify"),
            "checks": {r.name: {"status": r.status, "measured": r.measured,
                                "tolerance": r.tolerance, "margin": r.margin,
                                "seconds": r.seconds, "detail": r.detail}
                       for r in results},
            "passed": not failed}
    rows = [(r.name, r.status, r.measured, r.tolerance, r.margin, r.seconds)
            for r in results]
    return data, rows, ["check", "status", "measured", "tolerance", "margin", "seconds"], \
        EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="holderexp",
                     description="Hoelder-exponent bounds for 2D elliptic equations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("bounds", help="all lower bounds for a field file")
    p.add_argument("--field", required=True)
    p.add_argument("--centers", type=_at_least(1), default=33,
                   help="lattice points per axis (default 33)")
    p.add_argument("--radii", type=_at_least(1), default=12,
                   help="radii per centre, rho_k = d_x 2^-k (default 12)")
    p.add_argument("--angles", type=_at_least(16), default=DEFAULT_ANGLES,
                   help="starting quadrature nodes per circle (default %(default)s)")
    p.add_argument("--beta0-centers", type=_at_least(1), default=9)
    p.add_argument("--beta0-radii", type=_at_least(1), default=4)
    p.add_argument("--n", type=_at_least(64), default=512,
                   help="eigen-solver grid for beta0 (default 512)")
    p.add_argument("--no-beta0", action="store_true", help="skip the eigenvalue bound")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("wirtinger", help="best Wirtinger constant for a weight file")
    p.add_argument("--weights", required=True)
    p.add_argument("--n", type=_at_least(64), default=DEFAULT_GRID)
    common(p)
    p.set_defaults(func=cmd_wirtinger)

    p = sub.add_parser("sharp", help="verify the sharp family at (tau, M)")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--fast", action="store_true", help="coarser scans")
    p.add_argument("--samples", type=_at_least(2), default=512,
                   help="w_tau samples in CSV output")
    common(p)
    p.set_defaults(func=cmd_sharp)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--fast", action="store_true", help="reduced sample counts")
    p.add_argument("--angles", type=_at_least(16), default=DEFAULT_ANGLES)
    p.add_argument("--n", type=_at_least(64), default=DEFAULT_GRID)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        data, rows, header, code = args.func(args)
        _emit(render(data, args.format, rows, header), args.out)
    except (UsageError, ParseError, OSError) as err:
        print(f"holderexp: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except HolderError as err:
        print(f"holderexp: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_FAIL
    return code


if __name__ == "__main__":
    sys.exit(main())
