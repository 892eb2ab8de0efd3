"""``fdm`` command line.

    fdm <verb> [--fn F] [--fn2 G] [--measure M] [--q R] [--t R]
               [--scheme NAME:N] [--seed N] [--tol R] [--out P]

Verbs: transform, infconv, quermass, mixed, dualcurv, solve, verify, check.
``check`` takes a subject: minkowski, bm, jensen, pl, valuation or bridge.

``--out`` ending in ``.csv`` writes plot data, anything else JSON. Exit
codes: 0 success, 1 usage error, 2 invalid input, 3 solver did not converge.
``--seed`` overrides ``FDM_SEED``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .calculus import inf_convolution, regular_polygon_gauge, unit_ball_gauge
from .curvature import (
    body_bridge_check,
    dual_curvature_empirical,
    dual_curvature_semidiscrete,
    valuation_check,
    valuation_grid_pairs,
)
from .errors import FDMError, ValidationError
from .functions import GridFunction, MaxAffine, PointHull, Quadratic
from .inequalities import (
    GapReport,
    brunn_minkowski_gap,
    combination,
    jensen_monotonicity_check,
    minkowski_gap,
    prekopa_leindler_check,
    standard_battery,
)
from .integrals import DEFAULT_SCHEME, dual_quermassintegral, mixed_integral
from .quadrature import QuadratureScheme
from .solver import SolverOptions, result_from_values, solve, verify_solution

VERBS = ("transform", "infconv", "quermass", "mixed", "dualcurv", "solve", "verify", "check")
SUBJECTS = ("minkowski", "bm", "jensen", "pl", "valuation", "bridge")
SERIALIZABLE = (MaxAffine, PointHull, GridFunction, Quadratic)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fdm", description="Functional dual Minkowski toolkit.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("subject", nargs="?", help="check subject: " + ", ".join(SUBJECTS))
    p.add_argument("--fn")
    p.add_argument("--fn2")
    p.add_argument("--measure")
    p.add_argument("--q", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--scheme")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--battery", choices=("default",))
    return p


REQUIRED = {
    "transform": ("fn",),
    "infconv": ("fn", "fn2"),
    "quermass": ("fn", "q"),
    "mixed": ("fn", "fn2", "q"),
    "dualcurv": ("fn", "q"),
    "solve": ("measure", "q"),
    "verify": ("measure", "fn", "q"),
    "check": (),
}


def _validate(args):
    """Grammar checks that need no file access."""
    missing = [f"--{k}" for k in REQUIRED[args.verb] if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{args.verb} requires {', '.join(missing)}")
    if args.verb == "check":
        if args.subject not in SUBJECTS:
            raise UsageError(f"check needs a subject among {', '.join(SUBJECTS)}")
    elif args.subject is not None:
        raise UsageError(f"unexpected argument {args.subject!r}")
    if args.t is not None and not 0 < args.t < 1:
        raise UsageError("--t must lie in (0, 1)")
    if args.scheme is not None:
        try:
            QuadratureScheme.parse(args.scheme)
        except ValidationError as exc:
            raise UsageError(f"--scheme: {exc}") from None


def _scheme(args, default=DEFAULT_SCHEME):
    return QuadratureScheme.parse(args.scheme or default, args.seed)


def _write(args, obj, csv_obj=None):
    if not args.out:
        return
    if args.out.endswith(".csv"):
        io.emit_plot_data(csv_obj if csv_obj is not None else obj, args.out)
    else:
        data = obj if isinstance(obj, dict) else io.to_dict(obj)
        io.dump(data, args.out)


def _function(path, flag):
    try:
        return io.parse_function(path)
    except io.IoError as exc:
        raise ValidationError(f"{flag}: {exc}") from None
    except ValidationError as exc:
        raise type(exc)(f"{flag} {path}: {exc}") from None


def _measure(path):
    try:
        return io.parse_measure(path)
    except io.IoError as exc:
        raise ValidationError(f"--measure: {exc}") from None
    except ValidationError as exc:
        raise type(exc)(f"--measure {path}: {exc}") from None


def _grid_conjugate(g: GridFunction) -> GridFunction:
    """Dual box spanned by the extreme finite difference slopes of the grid."""
    vals = g.values
    lo, hi = [], []
    for ax in range(g.dim):
        d = np.diff(vals, axis=ax) / g.step[ax]
        d = d[np.isfinite(d)]
        lo.append(d.min() if d.size else -1.0)
        hi.append(d.max() if d.size else 1.0)
    lo, hi = np.array(lo), np.array(hi)
    hi = np.where(hi > lo, hi, lo + 1.0)
    return g.conjugate(lo, hi, g.shape)


def _sampled(f, dim, radius=5.0):
    n = 201 if dim == 1 else 101
    return GridFunction.sample(f, [-radius] * dim, [radius] * dim, [n] * dim)


def cmd_transform(args):
    f = _function(args.fn, "--fn")
    out = _grid_conjugate(f) if isinstance(f, GridFunction) else f.conjugate()
    _write(args, out)
    return f"transform: {type(f).__name__} -> {type(out).__name__}"


def cmd_infconv(args):
    f, g = _function(args.fn, "--fn"), _function(args.fn2, "--fn2")
    h = combination(f, g, args.t) if args.t is not None else inf_convolution(f, g)
    exact = isinstance(h, SERIALIZABLE)
    out = h if exact else _sampled(h, h.dim)
    _write(args, out)
    how = "exact" if exact else "sampled on a grid"
    return f"infconv: {type(h).__name__} ({how})"


def cmd_quermass(args):
    f = _function(args.fn, "--fn")
    r = dual_quermassintegral(f, args.q, _scheme(args))
    _write(args, r.to_dict())
    return f"value {r.value!r} stderr {r.stderr!r}"


def cmd_mixed(args):
    f, g = _function(args.fn, "--fn"), _function(args.fn2, "--fn2")
    r = mixed_integral(f, g, args.q, _scheme(args))
    _write(args, r.to_dict())
    return f"value {r.value!r} stderr {r.stderr!r}"


def cmd_dualcurv(args):
    f = _function(args.fn, "--fn")
    if isinstance(f, MaxAffine):
        m = dual_curvature_semidiscrete(f, args.q, args.scheme, args.seed)
    else:
        sch = _scheme(args, "mc:100000")
        m = dual_curvature_empirical(f, args.q, sch.n, sch.seed)
    _write(args, m)
    return f"dualcurv: {len(m.weights)} atoms, total mass {m.total!r}"


def cmd_solve(args):
    mu = _measure(args.measure)
    opts = SolverOptions(q=args.q, tol=args.tol or 1e-10, scheme=args.scheme, seed=args.seed)
    res = solve(mu, args.q, opts)
    ver = verify_solution(mu, args.q, res)
    _write(args, io.solve_result_dict(res, ver.to_dict()), res)
    status = "converged" if res.converged else "NotConverged"
    line = f"{status} after {res.iterations} iterations, residual_tv {res.residual_tv!r}, tau {res.tau!r}"
    return line, (EXIT_OK if res.converged else EXIT_NOT_CONVERGED)


def _h_from(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"--fn: cannot read {path}: {exc}") from None
    if isinstance(data, dict) and data.get("kind") == "solve_result":
        return io.from_dict(data["phi0_star"]), data
    h = _function(path, "--fn")
    if not isinstance(h, MaxAffine):
        raise ValidationError("--fn must hold a solve result or a max-affine h")
    return h, None


def cmd_verify(args):
    mu = _measure(args.measure)
    h, _ = _h_from(args.fn)
    index = {tuple(np.round(a, 12)): i for i, a in enumerate(h.slopes)}
    try:
        order = [index[tuple(np.round(x, 12))] for x in mu.atoms]
    except KeyError:
        raise ValidationError("--fn slopes must be the atoms of --measure") from None
    if len(order) != h.n_pieces:
        raise ValidationError("--fn slopes must be the atoms of --measure")
    res = result_from_values(mu, args.q, h.intercepts[order], args.scheme, args.seed)
    ver = verify_solution(mu, args.q, res, args.scheme, args.seed)
    _write(args, ver.to_dict())
    return f"tv {ver.tv!r} tau_identity {ver.tau_identity_lhs!r} vs {ver.tau_identity_rhs!r} inf_h {ver.inf_h!r}"


def _gap_reports(args) -> list[GapReport]:
    subj = args.subject
    scheme = _scheme(args)
    if args.fn is None:
        key = {"bm": "bm", "minkowski": "minkowski", "jensen": "jensen", "pl": "pl"}[subj]
        return standard_battery(scheme, args.seed, which=(key,))
    f = _function(args.fn, "--fn")
    g = _function(args.fn2, "--fn2") if args.fn2 else None
    if subj == "jensen":
        if args.q is None:
            raise UsageError("check jensen with --fn needs --q (q1; q2 = q1 - 1)")
        return [jensen_monotonicity_check(f, args.q, args.q - 1, scheme)]
    if g is None:
        raise UsageError(f"check {subj} with --fn needs --fn2")
    if subj == "minkowski":
        return [minkowski_gap(f, g, args.q if args.q is not None else 0.0, scheme)]
    t = args.t if args.t is not None else 0.5
    if subj == "pl":
        return [prekopa_leindler_check(f, g, t)]
    if args.q is None:
        raise UsageError("check bm needs --q")
    return [brunn_minkowski_gap(f, g, t, args.q, scheme)]


def cmd_check(args):
    subj = args.subject
    if subj in ("bm", "minkowski", "jensen", "pl"):
        reports = _gap_reports(args)
        if args.tol is not None:
            for r in reports:
                r.tol = args.tol
                r.passed = r.gap >= -r.threshold
        _write(args, {"kind": "gap_reports", "reports": [r.to_row() for r in reports]}, reports)
        bad = sum(not r.passed for r in reports)
        return f"check {subj}: {len(reports) - bad}/{len(reports)} passed"
    if subj == "valuation":
        rows = []
        q = args.q if args.q is not None else 0.0
        if args.fn:
            pairs = [("fn|fn2", _function(args.fn, "--fn"), _function(args.fn2, "--fn2"))]
        else:
            pairs = [("max(-x,2x)|max(-2x,x)", MaxAffine([[-1.0], [2.0]], [0, 0]), MaxAffine([[-2.0], [1.0]], [0, 0]))]
            pairs += valuation_grid_pairs()
        for name, f, g in pairs:
            r = valuation_check(f, g, q, _scheme(args), args.seed)
            err = max(r.stderr.values())
            rows.append(GapReport("valuation", r.max_discrepancy, 0.0, -r.max_discrepancy, err, name, 1e-12))
        _write(args, {"kind": "gap_reports", "reports": [r.to_row() for r in rows]}, rows)
        bad = sum(not r.passed for r in rows)
        return f"check valuation: {len(rows) - bad}/{len(rows)} passed"
    rows = []
    for name, K, q, exact in (("disc", unit_ball_gauge(2), 0.0, 1.0), ("disc", unit_ball_gauge(2), -2.0, 2.0),
                              ("12-gon", regular_polygon_gauge(12), 0.0, None)):
        if args.q is not None:
            q = args.q
        r = body_bridge_check(K, q, _scheme(args), args.seed)
        diff = abs(r.lhs.value - r.rhs)
        rows.append(GapReport("bridge", r.lhs.value, r.rhs, -diff, np.hypot(r.lhs.stderr, r.rhs_stderr),
                              f"{name} q={q:g}" + ("" if exact is None else f" closed form {exact:g}"), args.tol or 1e-3))
    _write(args, {"kind": "gap_reports", "reports": [r.to_row() for r in rows]}, rows)
    bad = sum(not r.passed for r in rows)
    return f"check bridge: {len(rows) - bad}/{len(rows)} passed"


COMMANDS = {
    "transform": cmd_transform,
    "infconv": cmd_infconv,
    "quermass": cmd_quermass,
    "mixed": cmd_mixed,
    "dualcurv": cmd_dualcurv,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "check": cmd_check,
}


def run(argv=None) -> int:
    """Parse ``argv``, dispatch and return the exit code."""
    logging.basicConfig(level=logging.WARNING, format="fdm: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
    except UsageError as exc:
        print(f"fdm: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out = COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"fdm: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"fdm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FDMError as exc:
        print(f"fdm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    line, code = out if isinstance(out, tuple) else (out, EXIT_OK)
    print(line)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
