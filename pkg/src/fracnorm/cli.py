"""Command-line front end: ``fracnorm <subcommand> ...``.

Rows go to stdout as CSV (default) or JSON lines, diagnostics to stderr.
Exit status: 0 when every check passed, 1 when a check failed, 2 on usage,
domain or numerical errors (nothing is written to stdout in that case).
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import constants, lab, norms, operators
from .errors import FracNormError
from .funcspace import VerySimpleFunction, evaluate, parse_function_spec
from .norms import PsiFunction
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .special import gamma

__all__ = ["RunConfig", "parse_grid", "run", "main"]

SPACINGS = ("linear", "log", "endpoint-geometric")
CATALOG = (
    ("f0", "x**-1 on (1, inf); |f0|_p = (p-1)**(-1/p)"),
    ("h_delta:<D>", "x**-alpha |ln x|**D on (0, 1/e); needs --alpha"),
    ("indicator:<h1>,<h2>", "indicator of (h1, h2); h2 may be inf"),
    ("power_alpha:<a>", "x**(a-1) on (0, inf); its derivative of order a vanishes"),
    ("const:<c>[,<b>]", "constant c on (0, b)"),
    ("zero", "the zero function on (0, 1)"),
    ("vs:<path>", "very simple function; file: step on line 1, then 'start coef' lines"),
)
OPERATORS = ("rl-integral", "marchaud", "rl-derivative-fd", "riesz", "weighted",
             "indicator-derivative")
CHECKS = ("indicator-bracket", "gls-indicator", "vs-bound", "besov-ratio", "gls-sobolev",
          "prop51", "factorization", "weighted")


class UsageError(FracNormError, ValueError):
    """Bad command-line input."""


@dataclass
class RunConfig:
    """Parsed invocation: subcommand, target and parameter record."""

    subcommand: str
    target: str | None
    params: dict = field(default_factory=dict)
    fmt: str = "csv"
    spec: QuadratureSpec = DEFAULT_SPEC


def parse_grid(text, spacing="linear"):
    """``start:stop:count`` as an array.

    ``endpoint-geometric`` approaches ``start`` from ``stop`` halving the
    distance at every step: ``start + (stop - start) * 2**-k``.
    """
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"grid must be start:stop:count, got {text!r}") from None
    if count < 1:
        raise UsageError("grid count must be positive")
    if spacing == "linear":
        return np.linspace(start, stop, count)
    if spacing == "log":
        if not (start > 0 and stop > 0):
            raise UsageError("log spacing needs positive bounds")
        return np.geomspace(start, stop, count)
    if spacing == "endpoint-geometric":
        return start + (stop - start) * 2.0 ** -np.arange(count)
    raise UsageError(f"spacing must be one of {SPACINGS}")


def _floats(text):
    return tuple(float(v) for v in text.split(","))


def _values(args, single, grid):
    one = getattr(args, single, None)
    many = getattr(args, grid, None)
    if (one is None) == (many is None):
        raise UsageError(f"give exactly one of --{single} or --{grid.replace('_', '-')}")
    if one is not None:
        return [one]
    return [float(v) for v in parse_grid(many, args.spacing)]


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required here")


def _spec(args):
    return QuadratureSpec(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


# subcommands: each returns (rows, all_passed)


def _cmd_apply(args, spec):
    _need(args, "alpha")
    xs = _values(args, "x", "x_grid")
    a = args.alpha
    ctx = {"operator": args.operator, "alpha": a}
    if args.operator == "indicator-derivative":
        _need(args, "h1", "h2")
        ctx.update(h1=args.h1, h2=args.h2)
        fn = lambda x: operators.indicator_derivative(args.h1, args.h2, a, x, with_flag=True)
    else:
        _need(args, "f")
        f = parse_function_spec(args.f, a)
        ctx["f"] = args.f
        if args.operator == "rl-integral":
            fn = lambda x: (operators.rl_integral(f, a, x, spec), False)
        elif args.operator == "marchaud":
            fn = lambda x: operators.marchaud_derivative(f, a, x, spec, with_flag=True)
        elif args.operator == "rl-derivative-fd":
            fn = lambda x: (operators.rl_derivative_fd(f, a, x, args.step, spec), False)
        elif args.operator == "riesz":
            fn = lambda x: (operators.riesz_potential_1d(f, a, x, spec), False)
        else:
            _need(args, "beta", "gamma")
            ctx.update(beta=args.beta, gamma=args.gamma)
            fn = lambda x: (operators.weighted_potential(f, a, args.beta, args.gamma, x, spec),
                            False)
    rows = []
    for x in xs:
        value, flag = fn(x)
        rows.append({**ctx, "x": x, "value": value, "flag": bool(flag)})
    return rows, True


def _cmd_norm(args, spec):
    _need(args, "f")
    ps = _values(args, "p", "p_grid")
    f = parse_function_spec(args.f, args.alpha)
    ctx = {"f": args.f, "kind": args.kind}
    rows = []
    for p in ps:
        if args.kind == "lp":
            value = norms.lp_norm(f, p, spec)
        else:
            _need(args, "alpha")
            ctx.update(alpha=args.alpha, b=args.b)
            value = norms.besov_norm(f, args.alpha, p, args.b, spec)
        rows.append({**ctx, "p": p, "norm_value": value, "divergent_flag": math.isinf(value)})
    return rows, True


def _cmd_constants(args, spec):
    _need(args, "alpha")
    ps = _values(args, "p", "p_grid")
    S = args.S if args.S is not None else constants.stein_constant(args.d, args.stein)
    rows = []
    for p in ps:
        row = {"alpha": args.alpha, "d": args.d, "S": S, "p": p,
               "q": constants.sobolev_q(p, args.alpha, args.d),
               "v2": constants.v2(args.alpha, args.d, p, S),
               "k_upper": constants.k_upper(args.alpha, args.d, p, S)}
        row["k_lower_shape"] = (constants.k_lower_shape(args.alpha, p)
                                if p < 1.0 / args.alpha else math.nan)
        rows.append(row)
    return rows, True


def _zeta(args):
    s1, s2 = _floats(args.zeta_support)
    return PsiFunction.constant(args.zeta_value, (s1, s2))


def _psi_for(args, f, spec):
    s1, s2 = _floats(args.psi_support)
    if args.psi == "natural":
        return norms.natural_psi(f, s1, s2, spec)
    return PsiFunction.constant(float(args.psi), (s1, s2))


def _vs(args):
    if args.f and args.f.startswith("vs:"):
        return VerySimpleFunction.from_file(args.f[3:])
    raise UsageError("this check needs --f vs:<path>")


_BRACKET_COLUMNS = ("alpha", "p", "q", "quantity", "lower", "upper", "passed")


def _bracket_row(report, extra=None):
    raw = report.row()
    if extra:
        raw.update(extra)
    row = {k: raw.pop(k, math.nan) for k in _BRACKET_COLUMNS}
    row.update(raw)
    return row


def _cmd_verify(args, spec):
    c = args.check
    reports = []
    if c == "indicator-bracket":
        _need(args, "alpha", "h1", "h2")
        for p in _values(args, "p", "p_grid"):
            reports.append(lab.verify_indicator_bracket(args.alpha, p, args.h1, args.h2, spec))
    elif c == "gls-indicator":
        _need(args, "alpha", "h1", "h2", "zeta_support")
        reports.append(lab.verify_gls_indicator(args.alpha, args.h1, args.h2, _zeta(args), spec))
    elif c == "vs-bound":
        _need(args, "alpha")
        vs = _vs(args)
        for p in _values(args, "p", "p_grid"):
            reports.append(lab.verify_vs_bound(vs, args.alpha, p, spec))
    elif c == "besov-ratio":
        _need(args, "alpha", "f")
        f = parse_function_spec(args.f, args.alpha)
        bound = 1.0 / gamma(1.0 - args.alpha)
        for p in _values(args, "p", "p_grid"):
            r = lab.besov_ratio(f, args.alpha, p, args.b, spec)
            ctx = {"check": c, "f": args.f, "alpha": args.alpha, "p": p, "b": args.b}
            reports.append(lab.BracketReport(r, 0.0, bound, r <= bound * (1 + 1e-3), ctx))
    elif c == "gls-sobolev":
        _need(args, "alpha", "f", "psi_support")
        f = parse_function_spec(args.f, args.alpha)
        reports.append(lab.verify_gls_sobolev(f, _psi_for(args, f, spec), args.alpha, spec,
                                              args.S))
    elif c == "prop51":
        _need(args, "alpha", "beta", "f")
        f = parse_function_spec(args.f, args.alpha)
        reports.append(lab.verify_prop51(f, args.alpha, args.beta, spec, args.b))
    elif c == "factorization":
        _need(args, "alpha", "beta", "g1", "g2", "p1", "p2")
        g1 = parse_function_spec(args.g1, args.alpha)
        g2 = parse_function_spec(args.g2, args.beta)
        reports.append(lab.verify_factorization(g1, g2, args.alpha, args.beta, args.p1,
                                                args.p2, spec))
    else:
        _need(args, "alpha", "beta", "gamma", "family", "p_grid")
        family = [parse_function_spec(t, args.alpha) for t in args.family.split(";")]
        ps = [float(v) for v in parse_grid(args.p_grid, args.spacing)]
        reports.extend(lab.verify_weighted_bracket(args.alpha, args.beta, args.gamma, family,
                                                   ps, spec))
    rows = [_bracket_row(r, {"check": c}) for r in reports]
    return rows, all(r.passed for r in reports)


def _cmd_sweep(args, spec):
    _need(args, "alpha", "family", "p_grid")
    a = args.alpha
    top = 1.0 / a
    family = [parse_function_spec(t, a) for t in args.family.split(";")]
    ps = sorted(float(v) for v in parse_grid(args.p_grid, args.spacing))
    kept = [p for p in ps if 1.0 + args.clip <= p <= top - args.clip]
    if len(kept) < len(ps):
        print(f"dropped {len(ps) - len(kept)} grid points within {args.clip:g} of an "
              "endpoint", file=sys.stderr)
    S = args.S if args.S is not None else constants.stein_constant(1)
    ctx = {"alpha": a, "family": args.family, "kernel": args.kernel, "S": S}
    rows, samples, ok = [], [], True
    for p in kept:
        s = lab.empirical_k_lower(a, p, family, spec, args.kernel)
        ku = constants.k_upper(a, 1, p, S)
        samples.append(s)
        ok &= s.ratio <= ku
        rows.append({**ctx, "row": "sample", "p": p, "q": s.q, "ratio": s.ratio,
                     "witness": s.witness, "k_upper": ku, "passed": s.ratio <= ku})
    endpoint = args.endpoint
    if endpoint is None and kept:
        endpoint = "left" if kept[0] - 1.0 < top - kept[-1] else "right"
    if len(samples) >= 5:
        slope = lab.blowup_slope(samples, endpoint)
        rows.append({**ctx, "row": "slope", "p": math.nan, "q": math.nan, "ratio": slope,
                     "witness": endpoint, "k_upper": -(1.0 - a), "passed": True})
    else:
        print("fewer than 5 samples: no slope fit", file=sys.stderr)
    return rows, ok


def _cmd_catalog(args, spec):
    rows = [{"name": n, "description": d} for n, d in CATALOG]
    if args.f:
        f = parse_function_spec(args.f, args.alpha)
        for x in _values(args, "x", "x_grid"):
            rows.append({"name": args.f, "description": f"value at {x:g}",
                         "x": x, "value": evaluate(f, x)})
    return rows, True


def _emit(rows, fmt, out):
    if fmt == "json":
        for r in rows:
            out.write(json.dumps(r, default=float) + "\n")
        return
    if not rows:
        return
    header = []
    for r in rows:
        header.extend(k for k in r if k not in header)
    w = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt_value(v) for k, v in r.items()})


def _fmt_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rel-tol", type=float, default=DEFAULT_SPEC.rel_tol)
    common.add_argument("--abs-tol", type=float, default=DEFAULT_SPEC.abs_tol)
    common.add_argument("--seed", type=int, default=None,
                        help="accepted for interface stability; every method is deterministic")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--spacing", choices=SPACINGS, default="linear")
    for name in ("alpha", "beta", "gamma", "p", "x", "h1", "h2", "p1", "p2", "S"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--d", type=int, default=1)
    common.add_argument("--b", type=float, default=1.0)
    common.add_argument("--f", help="function spec, see the catalog subcommand")
    common.add_argument("--p-grid", dest="p_grid")
    common.add_argument("--x-grid", dest="x_grid")

    parser = argparse.ArgumentParser(prog="fracnorm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    ap = sub.add_parser("apply", parents=[common], help="operator values on an x grid")
    ap.add_argument("operator", choices=OPERATORS)
    ap.add_argument("--step", type=float, default=1e-3, help="finite-difference step")

    nm = sub.add_parser("norm", parents=[common], help="norm against p")
    nm.add_argument("--kind", choices=("lp", "besov"), default="lp")

    ct = sub.add_parser("constants", parents=[common], help="envelope tables")
    ct.add_argument("--stein", choices=("classical", "flat"), default="classical")

    vf = sub.add_parser("verify", parents=[common], help="named checks")
    vf.add_argument("check", choices=CHECKS)
    vf.add_argument("--zeta-support", dest="zeta_support")
    vf.add_argument("--zeta-value", dest="zeta_value", type=float, default=1.0)
    vf.add_argument("--psi", default="natural", help="'natural' or a constant value")
    vf.add_argument("--psi-support", dest="psi_support")
    vf.add_argument("--g1")
    vf.add_argument("--g2")
    vf.add_argument("--family", help="';'-separated function specs")

    sw = sub.add_parser("sweep", parents=[common], help="empirical lower bound and slope")
    sw.add_argument("--family", default="f0", help="';'-separated function specs")
    sw.add_argument("--kernel", choices=lab.KERNELS, default="one_sided")
    sw.add_argument("--endpoint", choices=("left", "right"))
    sw.add_argument("--clip", type=float, default=1e-3)

    sub.add_parser("catalog", parents=[common], help="list test functions")
    return parser


_COMMANDS = {"apply": _cmd_apply, "norm": _cmd_norm, "constants": _cmd_constants,
             "verify": _cmd_verify, "sweep": _cmd_sweep, "catalog": _cmd_catalog}


def run(argv=None, out=None):
    """Run the CLI; returns the exit code."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rows, ok = _COMMANDS[args.subcommand](args, _spec(args))
    except (FracNormError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    buf = io.StringIO()
    _emit(rows, args.format, buf)
    out.write(buf.getvalue())
    return 0 if ok else 1


def main():
    sys.exit(run())
