"""Command-line interface.

Exit codes: 0 success; 1 check failed; 2 bad input (domain error, expression
syntax, malformed CSV); 3 no root / target out of range; 4 degenerate
function; 5 precision floor before k=10; 6 alpha outside the supported
branch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import statistics
import sys

import numpy as np

from . import __version__
from .abscissa import DEFAULT_GRID, DEFAULT_TOL, abscissa_report, scan
from .errors import (
    BranchError,
    DomainError,
    ExprSyntaxError,
    NoRootFound,
    PrecisionFloor,
    StolarskyError,
)
from .expr import DifferentiableFn
from .means import ALPHA_WINDOW, Interval, as_alpha, stolarsky_mean, stolarsky_mean_array, invert_alpha_array
from .proofcheck import DEFAULT_KMAX, asymptotic_convergence, implicit_checks
from .solutions import SolutionFamily, sweep_families

DEFAULT_ALPHA_GRID = "-3,-1,0,0.5,1,2,3"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NOROOT, EXIT_DEGENERATE, EXIT_FLOOR, EXIT_BRANCH = range(7)


def num(x) -> str:
    """17 significant digits: round-trips every double."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _clean(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


class Output:
    def __init__(self, command, fmt, out):
        self.command = command
        self.fmt = fmt
        self.out = out

    def emit(self, inputs, results, diagnostics=None, table=None, plain=None):
        """``table`` is (header, rows) used for csv; ``plain`` a list of lines."""
        diagnostics = diagnostics or {}
        if self.fmt == "json":
            doc = {"command": self.command, "inputs": inputs, "results": results,
                   "diagnostics": diagnostics}
            self.out.write(json.dumps(_clean(doc), indent=2) + "\n")
        elif self.fmt == "csv":
            header, rows = table
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([num(v) if isinstance(v, (float, np.floating)) else v for v in row])
            self.out.write(buf.getvalue())
        else:
            self.out.write("\n".join(plain) + "\n")


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


# --- mean ---------------------------------------------------------------------


def cmd_mean(args, out):
    try:
        value = stolarsky_mean(args.alpha, Interval(args.a, args.b))
    except StolarskyError as exc:
        _err(exc)
        return EXIT_INPUT
    o = Output("mean", args.format, out)
    o.emit(
        {"alpha": args.alpha, "a": args.a, "b": args.b},
        {"mean": value},
        {"branch": as_alpha(args.alpha).branch.value},
        table=(["alpha", "a", "b", "mean"], [[args.alpha, args.a, args.b, value]]),
        plain=[num(value)],
    )
    return EXIT_OK


# --- abscissa -------------------------------------------------------------------


def cmd_abscissa(args, out):
    try:
        fn = DifferentiableFn.from_expr(args.f)
    except ExprSyntaxError as exc:
        _err(f"syntax error at offset {exc.offset}: {exc}")
        return EXIT_INPUT
    inputs = {"f": fn.label, "a": args.a, "b": args.b, "alpha": args.alpha,
              "grid": args.grid, "tol": args.tol}
    o = Output("abscissa", args.format, out)
    try:
        iv = Interval(args.a, args.b)
        if args.alpha is not None:
            rep = abscissa_report(fn, args.alpha, iv, args.grid, args.tol)
            results = rep.as_dict()
            slope, roots, degenerate = rep.slope, rep.abscissas, rep.degenerate
        else:
            s = scan(fn, iv, args.grid, args.tol)
            if not s.degenerate and not s.roots:
                raise NoRootFound("no sign change of f' - slope and no grid point within tolerance")
            slope, roots, degenerate = s.slope, s.roots, s.degenerate
            results = {"slope": slope, "abscissas": roots, "degenerate": degenerate}
    except NoRootFound as exc:
        _err(exc)
        return EXIT_NOROOT
    except (StolarskyError, ValueError) as exc:
        _err(exc)
        return EXIT_INPUT

    plain = [f"slope: {num(slope)}", "abscissas: [" + ", ".join(num(c) for c in roots) + "]"]
    rows = [["abscissa", c] for c in roots]
    rows.insert(0, ["slope", slope])
    if args.alpha is not None:
        plain += [f"mean: {num(results['mean'])}",
                  f"min_distance: {num(results['min_distance'])}",
                  f"matches: {str(results['matches']).lower()}"]
        rows += [["mean", results["mean"]], ["min_distance", results["min_distance"]],
                 ["matches", str(results["matches"]).lower()]]
    if degenerate:
        plain.append("degenerate: true")
        rows.append(["degenerate", "true"])
    o.emit(inputs, results, {}, table=(["quantity", "value"], rows), plain=plain)
    if degenerate:
        _err("f' equals the secant slope across the interval (affine f)")
        return EXIT_DEGENERATE
    return EXIT_OK


# --- verify ---------------------------------------------------------------------


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad {what}: {text!r}") from None


def cmd_verify(args, out):
    grid = _floats(args.alpha_grid, "alpha grid")
    rows = sweep_families(grid, trials=args.trials, seed=args.seed)
    ok = all(r.passes(args.tol) for r in rows)
    failures = [
        {"alpha": r.alpha, "max_fde": r.max_fde, "max_ode": r.max_ode,
         "fde_witness": r.fde_witness, "ode_witness": r.ode_witness}
        for r in rows if not r.passes(args.tol)
    ]
    o = Output("verify", args.format, out)
    plain = [f"{'alpha':>8}  {'trials':>6}  {'max_fde':>24}  {'max_ode':>24}  status"]
    for r in rows:
        status = "ok" if r.passes(args.tol) else "FAIL"
        plain.append(f"{r.alpha:>8g}  {r.trials:>6d}  {num(r.max_fde):>24}  {num(r.max_ode):>24}  {status}")
    o.emit(
        {"alpha_grid": grid, "trials": args.trials, "seed": args.seed, "tol": args.tol,
         "rng": "numpy PCG64"},
        {"rows": [{"alpha": r.alpha, "trials": r.trials, "max_fde": r.max_fde,
                   "max_ode": r.max_ode, "pass": r.passes(args.tol)} for r in rows],
         "pass": ok},
        {"violations": failures},
        table=(["alpha", "trials", "max_fde", "max_ode", "pass"],
               [[r.alpha, r.trials, r.max_fde, r.max_ode, str(r.passes(args.tol)).lower()] for r in rows]),
        plain=plain,
    )
    for f in failures:
        w = f["fde_witness"]
        _err(f"alpha={f['alpha']:g}: max_fde={num(f['max_fde'])} max_ode={num(f['max_ode'])} "
             f"witness c={w['c']} a={num(w['a'])} b={num(w['b'])}")
    return EXIT_OK if ok else EXIT_FAIL


# --- proofcheck -------------------------------------------------------------------


def _opt(x):
    return None if x is None else float(x)


def cmd_proofcheck(args, out):
    alpha = as_alpha(args.alpha)
    if alpha.value in (0.0, 1.0):
        _err(f"alpha={alpha.value:g}: the cases alpha in {{0, 1}} of the implicit-function "
             "construction are not covered")
        return EXIT_BRANCH
    if alpha.value == 2.0:
        _err("alpha=2: S and T vanish identically so the R/S limit is 0/0; "
             "use `verify --alpha-grid 2` for this case")
        return EXIT_BRANCH
    try:
        c1, c2, c3 = _floats(args.family, "family")
    except (ValueError, argparse.ArgumentTypeError) as exc:
        _err(f"--family needs three comma-separated numbers: {exc}")
        return EXIT_INPUT
    fam = SolutionFamily(alpha, c1, c2, c3)
    try:
        imp = implicit_checks(alpha, args.t)
        conv = asymptotic_convergence(alpha, fam, args.t, kmax=args.kmax)
    except PrecisionFloor as exc:
        _err(f"{exc} (best k = {exc.best_k})")
        return EXIT_FLOOR
    except BranchError as exc:
        _err(exc)
        return EXIT_BRANCH
    except StolarskyError as exc:
        _err(exc)
        return EXIT_FAIL

    imp_ok = imp.passes()
    conv_ok = conv.passes()
    deriv_rows = [
        {"kind": kind, "point": c.point, "analytic": c.analytic, "finite_difference": c.finite_difference,
         "relative_error": c.relative_error, "order": _opt(c.min_order)}
        for kind, checks in (("phi", imp.phi_checks), ("g", imp.g_checks)) for c in checks
    ]
    conv_rows = [
        {"k": r.k, "r": r.r, "R": r.R, "S": r.S, "T": r.T, "dR": r.dR, "dS": r.dS, "dT": r.dT,
         "x0": r.x0, "T_over_S": r.T_over_S, "lhs": r.lhs, "rhs": r.rhs,
         "identity_residual": r.identity_residual, "chain_residual": r.chain_residual,
         "ode_estimate": r.ode_estimate, "noisy": r.noisy}
        for r in conv.rows
    ]
    results = {
        "lemma": {"h0": imp.h0, "seed_residual": imp.seed_residual,
                  "phi_residual_max": max(imp.phi_residuals),
                  "g_residual_max": max(imp.g_residuals),
                  "partial_mismatch": imp.partial_mismatch},
        "derivatives": deriv_rows,
        "leading": {"R0": conv.R0, "S0": conv.S0, "T0": conv.T0, "T_over_S": conv.T_over_S_limit},
        "convergence": conv_rows,
        "orders": {q: [_opt(v) for v in vals] for q, vals in conv.orders.items()},
        "decreasing": conv.decreasing,
        "x0_constant": conv.x0_constant,
        "limiting_ode_residual": conv.limiting_ode_residual,
        "max_identity_residual": conv.max_identity_residual,
        "max_chain_residual": conv.max_chain_residual,
        "pass": imp_ok and conv_ok,
    }
    diagnostics = {"best_k": conv.best_k, "floor_k": conv.floor_k,
                   "implicit_pass": imp_ok, "convergence_pass": conv_ok}

    plain = [
        f"alpha={alpha.value:g} t={num(args.t)} family=({c1:g}, {c2:g}, {c3:g})",
        f"lemma seed h0={num(imp.h0)} residual={imp.seed_residual:.3e}",
        f"phi residual max={max(imp.phi_residuals):.3e}  g residual max={max(imp.g_residuals):.3e}  "
        f"g' vs implicit partials={imp.partial_mismatch:.3e}",
        f"{'kind':>4} {'point':>12} {'analytic':>22} {'fd rel err':>11} {'order':>7}",
    ]
    for d in deriv_rows:
        order = "exact" if d["order"] is None else f"{d['order']:.3f}"
        plain.append(f"{d['kind']:>4} {d['point']:>12.6g} {num(d['analytic']):>22} "
                     f"{d['relative_error']:>11.3e} {order:>7}")
    plain.append(f"R0={num(conv.R0)} S0={num(conv.S0)} T0={num(conv.T0)} T0/S0={num(conv.T_over_S_limit)}")
    plain.append(f"{'k':>3} {'|R-R0|':>11} {'|S-S0|':>11} {'|T-T0|':>11} {'identity':>10} {'chain':>10} {'ode(r)':>11}")
    for r in conv.rows:
        plain.append(f"{r.k:>3} {r.dR:>11.4e} {r.dS:>11.4e} {r.dT:>11.4e} {r.identity_residual:>10.2e} "
                     f"{r.chain_residual:>10.2e} {r.ode_estimate:>11.4e}{'  noisy' if r.noisy else ''}")
    plain.append(f"limiting ODE residual (extrapolated) = {conv.limiting_ode_residual:.3e}")
    plain.append("PASS" if results["pass"] else "FAIL")

    table = (["k", "r", "R", "S", "T", "dR", "dS", "dT", "identity_residual", "chain_residual", "ode_estimate"],
             [[r.k, r.r, r.R, r.S, r.T, r.dR, r.dS, r.dT, r.identity_residual, r.chain_residual, r.ode_estimate]
              for r in conv.rows])
    Output("proofcheck", args.format, out).emit(
        {"alpha": alpha.value, "t": args.t, "kmax": args.kmax, "family": [c1, c2, c3]},
        results, diagnostics, table=table, plain=plain,
    )
    return EXIT_OK if results["pass"] else EXIT_FAIL


# --- fit-alpha --------------------------------------------------------------------


def read_triples(path):
    """Rows ``a,b,c``; blank lines and lines starting with '#' are skipped.
    Returns (line_numbers, array of shape (n, 3))."""
    lines, rows = [], []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or not "".join(rec).strip() or rec[0].lstrip().startswith("#"):
                continue
            if len(rec) != 3:
                raise ValueError(f"row {lineno}: expected 3 fields a,b,c, got {len(rec)}")
            try:
                vals = [float(v) for v in rec]
            except ValueError:
                raise ValueError(f"row {lineno}: non-numeric field in {','.join(rec)!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"row {lineno}: non-finite value")
            if not (vals[0] > 0 and vals[1] > 0):
                raise ValueError(f"row {lineno}: endpoints must be > 0")
            lines.append(lineno)
            rows.append(vals)
    if not rows:
        raise ValueError("no data rows")
    return lines, np.array(rows, dtype=float)


def cmd_fit_alpha(args, out):
    try:
        lines, data = read_triples(args.input)
    except OSError as exc:
        _err(exc)
        return EXIT_INPUT
    except ValueError as exc:
        _err(exc)
        return EXIT_INPUT
    a, b, c = data[:, 0], data[:, 1], data[:, 2]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    outside = ~((lo < c) & (c < hi))
    if outside.any():
        for i in np.flatnonzero(outside):
            _err(f"row {lines[i]}: c={num(c[i])} is not inside ({num(lo[i])}, {num(hi[i])})")
        return EXIT_NOROOT
    alphas = invert_alpha_array(a, b, c)
    unattained = np.isnan(alphas)
    if unattained.any():
        for i in np.flatnonzero(unattained):
            _err(f"row {lines[i]}: c={num(c[i])} not attained for alpha in {list(ALPHA_WINDOW)}")
        return EXIT_NOROOT
    achieved = stolarsky_mean_array(alphas, a, b)
    resid = np.abs(achieved - c) / np.maximum(1.0, np.abs(c))
    median = statistics.median(alphas.tolist())
    bad = resid > args.tol
    rows = [{"row": ln, "a": float(x), "b": float(y), "c": float(z), "alpha": float(al), "residual": float(rs)}
            for ln, x, y, z, al, rs in zip(lines, a, b, c, alphas, resid)]
    plain = [f"{'row':>5} {'alpha':>24} {'residual':>10}"]
    plain += [f"{r['row']:>5} {num(r['alpha']):>24} {r['residual']:>10.2e}" for r in rows]
    plain.append(f"median alpha: {num(median)}")
    Output("fit-alpha", args.format, out).emit(
        {"input": args.input, "tol": args.tol, "rows": len(rows)},
        {"rows": rows, "median_alpha": median},
        {"max_residual": float(resid.max()), "tolerance_violations": int(bad.sum())},
        table=(["row", "a", "b", "c", "alpha", "residual"],
               [[r["row"], r["a"], r["b"], r["c"], r["alpha"], r["residual"]] for r in rows]),
        plain=plain,
    )
    if bad.any():
        _err(f"{int(bad.sum())} row(s) exceed tol={args.tol:g}")
        return EXIT_FAIL
    return EXIT_OK


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stolarsky", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp, default):
        sp.add_argument("--format", choices=("json", "csv", "plain"), default=default)

    sp = sub.add_parser("mean", help="evaluate S_alpha(a, b)")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    fmt(sp, "plain")
    sp.set_defaults(func=cmd_mean)

    sp = sub.add_parser("abscissa", help="mean-value abscissas of f on (a, b)")
    sp.add_argument("-f", required=True, help="expression in x, e.g. '1/x + 5*x'")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None, help="compare against S_alpha(a, b)")
    sp.add_argument("--grid", type=int, default=DEFAULT_GRID)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    fmt(sp, "json")
    sp.set_defaults(func=cmd_abscissa)

    sp = sub.add_parser("verify", help="seeded sweep of FDE/ODE residuals over solution families")
    sp.add_argument("--alpha-grid", default=DEFAULT_ALPHA_GRID)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-9)
    fmt(sp, "plain")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("proofcheck", help="implicit functions and R/S/T convergence")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    sp.add_argument("--family", default="1,1,1", help="c1,c2,c3")
    fmt(sp, "plain")
    sp.set_defaults(func=cmd_proofcheck)

    sp = sub.add_parser("fit-alpha", aliases=["fit_alpha"], help="recover alpha from a,b,c triples")
    sp.add_argument("--input", required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    fmt(sp, "plain")
    sp.set_defaults(func=cmd_fit_alpha)
    return p


LIST_FLAGS = ("--alpha-grid", "--family")


def _join_list_values(argv):
    # argparse reads "-3,-1" as an option; glue list values to their flag
    argv = list(argv)
    out, i = [], 0
    while i < len(argv):
        if argv[i] in LIST_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    argv = _join_list_values(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "t", 1.0) is not None and getattr(args, "t", 1.0) <= 0:
        _err("--t must be > 0")
        return EXIT_INPUT
    try:
        return args.func(args, out)
    except argparse.ArgumentTypeError as exc:
        _err(exc)
        return EXIT_INPUT
    except DomainError as exc:
        _err(exc)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
