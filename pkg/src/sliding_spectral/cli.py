"""Command-line entry point.

Every command writes a CSV (``--out``, default stdout) with a header row,
17 significant digits and LF endings, and prints a one-line summary on
stderr.  Exit status: 0 on success, 2 for configuration errors, 3 when a
solver fails.  ``--error-json`` additionally prints the error as JSON on
stdout.  ``--config FILE`` reads ``key = value`` lines that override the
flags (keys are the long flag names with dashes or underscores).
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

import numpy as np

from . import coulomb, dirac, inverse, schrodinger, specfun, statsum
from .io import load_potential_csv, write_csv
from .potentials import PotentialSpec, from_tag
from .types import SolverError

EXIT_CONFIG = 2
EXIT_SOLVER = 3


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _tolerance(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1e-3:
        raise argparse.ArgumentTypeError("tolerance must lie in (0, 1e-3]")
    return v


def _add_potential(p):
    p.add_argument("--q", default="zero", help="potential tag: zero, const:c, sin, gauss:mu,sigma,amp, bump:c,w,amp")
    p.add_argument("--q-file", default=None, help="two-column CSV (r, q) overriding --q")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sliding-spectral", description="Forward and sliding inverse spectral computations.")
    common = _Parser(add_help=False)
    common.add_argument("--out", default="-", help="CSV output path (default: stdout)")
    common.add_argument("--config", default=None, help="key = value file overriding the flags")
    common.add_argument("--error-json", action="store_true", help="print errors as JSON on stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("specfun", parents=[common], help="evaluate a special function")
    p.add_argument("--func", required=True, choices=["gamma", "loggamma", "M", "U", "whitM", "whitW"])
    p.add_argument("--alpha", type=_complex, default=0j, help="first parameter (kappa for Whittaker)")
    p.add_argument("--c", type=_complex, default=1 + 0j, help="second parameter (integer l for Whittaker)")
    p.add_argument("--x", type=_complex, action="append", required=True, help="argument; repeatable")
    p.add_argument("--tol", type=_tolerance, default=None, help="Kummer series tolerance in (0, 1e-3] (default 1e-16)")

    p = sub.add_parser("eigen", parents=[common], help="Dirichlet spectrum of the radial Schrodinger problem")
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, default=20)
    _add_potential(p)

    p = sub.add_parser("defect", parents=[common], help="quantum defect from a Dirichlet spectrum")
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--order", type=int, default=3, help="polynomial order of the 1/n extrapolation")
    _add_potential(p)

    p = sub.add_parser("dirac", parents=[common], help="radial Dirac spectrum and defect")
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--psi", type=float, default=math.pi / 2)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, default=40)
    _add_potential(p)

    p = sub.add_parser("coulomb", parents=[common], help="Coulomb-Dirac tail defect")
    p.add_argument("--a-coul", type=float, required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--r-grid", default="0.5:3:0.25")
    p.add_argument("--z-list", default=None, help="comma list of energies (default 10m, 50m, 250m)")
    _add_potential(p)

    p = sub.add_parser("invert", parents=[common], help="spectra -> defect curve -> potential")
    p.add_argument("--pipeline", choices=["schrodinger", "dirac"], default="schrodinger")
    p.add_argument("--l", type=int, default=None, help="angular number (default 0, or 1 for dirac)")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--psi", type=float, default=math.pi / 2)
    p.add_argument("--a-grid", required=True, help="lo:hi:step or comma list")
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--smooth", action="store_true", help="Savitzky-Golay (window 7, order 3) before differencing")
    p.add_argument("--cache-dir", default=None)
    _add_potential(p)

    p = sub.add_parser("statsum", parents=[common], help="statistical sums and their expansions")
    p.add_argument("--law", default="nsq", help="nsq, box:a or harmonic")
    p.add_argument("--T-grid", default="100,1000,10000")
    p.add_argument("--delta", type=float, default=0.0, help="defect in the expansion")
    p.add_argument("--check-theta", action="store_true", help="print both sides of the theta identity")
    p.add_argument("--z", type=float, default=1.0, help="argument of the theta identity")
    return ap


def _subparser_actions(parser):
    return [a for sub in parser._subparsers._group_actions[0].choices.values() for a in sub._actions]


def _parse(parser, argv):
    """Parse the flags; with --config, required flags may come from the file instead."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return _apply_config(parser.parse_args(argv), parser)
    required = [a for a in _subparser_actions(parser) if a.required]
    for act in required:
        act.required = False
    try:
        args = parser.parse_args(argv)
    finally:
        for act in required:
            act.required = True
    args = _apply_config(args, parser)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    missing = [a.option_strings[0] for a in sub._actions if a.required and getattr(args, a.dest) is None]
    if missing:
        raise ConfigError(f"missing required setting(s): {', '.join(missing)}")
    return args


def _apply_config(args, parser):
    if not args.config:
        return args
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys are case sensitive (T-grid)
    try:
        with open(args.config) as fh:
            cp.read_string("[run]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    for key, raw in cp["run"].items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise ConfigError(f"unknown config key {key!r}")
        act = actions[dest]
        if isinstance(act, argparse._StoreTrueAction):
            value = raw.strip().lower() in ("1", "true", "yes", "on")
        elif act.type is not None:
            try:
                value = act.type(raw.strip())
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from None
        else:
            value = raw.strip()
        if isinstance(act, argparse._AppendAction):
            value = [value]
        if act.choices is not None and value not in act.choices:
            raise ConfigError(f"{key} must be one of {sorted(act.choices)}")
        setattr(args, dest, value)
    return args


def _potential(args) -> PotentialSpec:
    if getattr(args, "q_file", None):
        return load_potential_csv(args.q_file)
    return from_tag(args.q)


# ---------------------------------------------------------------------------
# commands


def _cmd_specfun(args):
    tol = args.tol if args.tol is not None else 1e-16
    rows = []
    for x in args.x:
        if args.func == "gamma":
            v = specfun.gamma(x)
        elif args.func == "loggamma":
            v = specfun.log_gamma(x)
        elif args.func == "M":
            v = specfun.kummer_phi(args.alpha, args.c, x, tol=tol)
        elif args.func == "U":
            v = specfun.tricomi_u(args.alpha, args.c, x)
        else:
            if args.c.imag != 0 or args.c.real != int(args.c.real):
                raise ConfigError("Whittaker functions take an integer l in --c")
            f = specfun.whittaker_m if args.func == "whitM" else specfun.whittaker_w
            v = f(args.alpha, int(args.c.real), x)
        v = complex(v)
        rows.append((x.real, x.imag, v.real, v.imag))
    write_csv(args.out, ["x_re", "x_im", "value_re", "value_im"], rows)
    return f"specfun {args.func}: {len(rows)} value(s)"


def _cmd_eigen(args):
    prob = schrodinger.RadialProblem(_potential(args), args.l, args.a)
    spec = schrodinger.eigenvalues_dirichlet(prob, args.n)
    write_csv(args.out, ["n", "z", "sqrt_z", "residual"], zip(spec.n, spec.z, np.sqrt(spec.z), spec.residual))
    return f"eigen l={args.l} a={args.a:g} q={args.q}: {len(spec)} levels, max residual {spec.residual.max():.2e}"


def _cmd_defect(args):
    prob = schrodinger.RadialProblem(_potential(args), args.l, args.a)
    spec = schrodinger.eigenvalues_dirichlet(prob, args.n)
    est = schrodinger.estimate_defect(spec, args.a, args.l, order=args.order)
    rows = [(n, z, d) for n, z, d in zip(spec.n, spec.z, est.per_level)]
    write_csv(args.out, ["n", "z", "defect_level"], rows)
    return f"defect l={args.l} a={args.a:g} q={args.q}: {est.value:.12g} +- {est.uncertainty:.2e} from {len(spec)} levels"


def _cmd_dirac(args):
    params = dirac.DiracParams(args.l, args.m, _potential(args))
    spec = dirac.eigenvalues_bc(params, args.a, args.psi, (1, args.n))
    est = dirac.estimate_defect_dirac(spec, args.a, args.l, args.psi)
    write_csv(args.out, ["n", "z", "residual", "defect_level"], zip(spec.n, spec.z, spec.residual, est.per_level))
    return f"dirac l={args.l} m={args.m:g} psi={args.psi:.6g} a={args.a:g}: {len(spec)} levels, defect {est.value:.10g}"


def _cmd_coulomb(args):
    params = coulomb.CoulombParams(args.a_coul, args.l, args.m)
    r = inverse.parse_grid(args.r_grid)
    z_list = None if args.z_list is None else [float(v) for v in args.z_list.split(",")]
    q = _potential(args)
    if q.kind == "zero":
        est = np.zeros(r.size)
    else:
        est, _ = coulomb.coulomb_dirac_defect(params, q, r, z_list)
    rows = [(x, params.omega, d, math.cos(d), -math.sin(d)) for x, d in zip(r, est)]
    write_csv(args.out, ["r", "omega", "defect", "phase_re", "phase_im"], rows)
    return f"coulomb a={args.a_coul:g} l={args.l} omega={params.omega:.12g}: {r.size} radii"


def _cmd_invert(args):
    q = _potential(args)
    grid = inverse.parse_grid(args.a_grid)
    smooth = inverse.Smoothing() if args.smooth else None
    if args.pipeline == "schrodinger":
        ell = 0 if args.l is None else args.l
        res = inverse.sliding_pipeline_schrodinger(q, ell, grid, args.n, smoothing=smooth, cache_dir=args.cache_dir)
    else:
        ell = 1 if args.l is None else args.l
        res = inverse.sliding_pipeline_dirac(q, ell, args.m, args.psi, grid, args.n, smoothing=smooth,
                                             cache_dir=args.cache_dir)
    rows = zip(res.curve.endpoints, res.curve.values, res.uncertainty, res.q_hat, res.q_true, res.valid)
    write_csv(args.out, ["a", "defect", "defect_uncertainty", "q_hat", "q_true", "valid"], rows)
    if res.valid.sum() < 3:
        raise SolverError("fewer than three endpoints produced a defect")
    return (f"invert {args.pipeline} q={args.q}: {grid.size} endpoints, L2 rel error "
            f"{res.l2_relative_error:.3e}, max error {res.max_error:.3e}")


def _cmd_statsum(args):
    if args.check_theta:
        lhs, rhs = statsum.theta_identity_check(args.z)
        write_csv(args.out, ["z", "lhs", "rhs", "difference"], [(args.z, lhs, rhs, lhs - rhs)])
        return f"theta identity z={args.z:g}: |lhs - rhs| = {abs(lhs - rhs):.2e}"
    law = statsum.level_law(args.law)
    kind, _, arg = args.law.partition(":")
    if kind == "harmonic":
        asym = lambda T: statsum.asympt_anharmonic(T, args.delta)  # noqa: E731
    else:
        a = math.pi if kind == "nsq" else float(arg)
        asym = lambda T: statsum.asympt_1d(T, a, args.delta)  # noqa: E731
    T_grid = inverse.parse_grid(args.T_grid)
    rows = statsum.report(law, T_grid, asym)
    write_csv(args.out, ["T", "Z_direct", "Z_asymptotic", "residual"],
              [(r.T, r.z_direct, r.z_asymptotic, r.residual) for r in rows])
    return f"statsum {args.law}: {len(rows)} temperatures, last residual {rows[-1].residual:.3e}"


COMMANDS = {
    "specfun": _cmd_specfun,
    "eigen": _cmd_eigen,
    "defect": _cmd_defect,
    "dirac": _cmd_dirac,
    "coulomb": _cmd_coulomb,
    "invert": _cmd_invert,
    "statsum": _cmd_statsum,
}


def _fail(args_error_json: bool, code: int, exc: BaseException) -> int:
    if args_error_json:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}, sort_keys=True))
    print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    want_json = "--error-json" in argv
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        want_json = want_json or args.error_json
    except ConfigError as exc:
        return _fail(want_json, EXIT_CONFIG, exc)
    try:
        summary = COMMANDS[args.command](args)
    except (SolverError, specfun.ConvergenceError, ArithmeticError) as exc:
        return _fail(want_json, EXIT_SOLVER, exc)
    except (ValueError, OSError, NotImplementedError) as exc:
        return _fail(want_json, EXIT_CONFIG, exc)
    print(summary, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
