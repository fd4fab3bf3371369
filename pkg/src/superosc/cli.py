"""Command-line front end: verification suites, geodesic tables, case reports.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .lienard import (
    caseII_family,
    caseIII_family,
    duffing_shift,
    dvdp_example,
    verify_equivalence,
)
from .metrisability import (
    CubicOscSpec,
    DegenerateSolution,
    LiouvilleGateError,
    chebyshev_points,
    classify,
    reconstruct_metric,
    round_trip_error,
    solve_psi,
)
from .numkit.expr import ParseError
from .numkit.special import HypergeometricDomainError
from .oscillator import (
    BranchError,
    DegenerateBranch,
    I1,
    I2,
    N1,
    N2,
    OscParams,
    PhaseState,
    arc_drift,
    degenerate_geodesic,
    explicit_geodesic,
    integrate_oscillator,
)

SCHEMA = "superosc/1"
TOL = {"rtol": 1e-12, "atol": 1e-14}
THRESHOLDS = {
    "I1": 1e-9, "I2": 1e-6, "N1": 1e-6, "N2": 1e-6,
    "residual": 1e-6, "residual_dvdp": 1e-5, "J1": 1e-6, "J2": 1e-5,
}


class UsageError(ValueError):
    pass


# -- argument handling ------------------------------------------------------------

_NEG = re.compile(r"^-(\d|\.\d)")


def preprocess_argv(argv: list[str]) -> list[str]:
    """Glue negative values to their option (``--n -5/3`` -> ``--n=-5/3``)."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEG.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    try:
        return float(_rational(parts[0])), float(_rational(parts[1]))
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"bad pair {text!r}") from None


def _num(v):
    """JSON-friendly scalar (exact rationals as strings)."""
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return _num(obj)


def emit_json(report: dict, out=None) -> str:
    text = json.dumps(_jsonable({"schema": SCHEMA, **report}), indent=2, sort_keys=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")
    return text


def _random_ics(seed, count, lo_y, hi_y, lo_u, hi_u):
    rng = np.random.default_rng(seed)
    return [(float(rng.uniform(lo_y, hi_y)), float(rng.uniform(lo_u, hi_u))) for _ in range(count)]


# -- verify-integrals -------------------------------------------------------------


def _osc_params(n, delta) -> OscParams:
    try:
        return OscParams(n, delta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify_integrals(args) -> tuple[int, dict]:
    p = _osc_params(args.n, args.delta)
    ics = list(args.ic or [])
    if args.random_ics:
        ics += _random_ics(args.seed, args.random_ics, 0.5, 1.5, -0.5, 0.5)
    if not ics:
        ics = [(1.0, 0.0)]
    cases, ok = [], True
    for y0, u0 in ics:
        if not p.in_domain(y0):
            raise UsageError(f"initial y={y0} outside the domain of n={p.n}")
        traj = integrate_oscillator(p, PhaseState(0.0, y0, u0), args.span, **TOL)
        states = [PhaseState(t, y, u) for t, (y, u) in zip(traj.t, traj.y)]
        case = {"ic": [y0, u0], "status": traj.status, "x_end": traj.t_end, "nodes": len(states)}
        if p.is_log:
            case["N1_drift"] = float(np.ptp([N1(s, p.delta) for s in states]))
            case["N2_drift"] = float(np.ptp([N2(s, p.delta) for s in states]))
            passed = case["N1_drift"] < THRESHOLDS["N1"] and case["N2_drift"] < THRESHOLDS["N2"]
        else:
            case["I1_drift"] = float(np.ptp([I1(p, s) for s in states]))
            vals, us, excluded = [], [], 0
            for s in states:
                try:
                    vals.append(I2(p, s))
                    us.append(s.u)
                except (HypergeometricDomainError, DegenerateBranch):
                    excluded += 1
            case["I2_drift"] = arc_drift(vals, us) if vals else None
            case["I2_excluded_nodes"] = excluded
            passed = case["I1_drift"] < THRESHOLDS["I1"] and (
                case["I2_drift"] is None or case["I2_drift"] < THRESHOLDS["I2"])
        # y -> 0 in finite x is a property of the equation, not an integrator failure
        ys = np.abs(traj.y[:, 0])
        case["stopped_at_singularity"] = bool(not traj.success and ys[-1] < 1e-2 * ys.max())
        passed = passed and (traj.success or case["stopped_at_singularity"])
        case["pass"] = passed
        ok &= passed
        cases.append(case)
    report = {"command": "verify-integrals", "n": p.n, "delta": p.delta, "span": args.span,
              "integrals": ["N1", "N2"] if p.is_log else ["I1", "I2"],
              "thresholds": THRESHOLDS, "cases": cases, "pass": ok}
    return (0 if ok else 1), report


# -- geodesics ----------------------------------------------------------------------


def geodesic_rows(p: OscParams, C3: float, C4: float, ys) -> list[tuple]:
    rows = []
    for y in ys:
        pair = []
        for branch in (1, -1):
            try:
                if C3 == 0:
                    pair.append(degenerate_geodesic(p, C4, y, branch))
                else:
                    pair.append(explicit_geodesic(p, C3, C4, y, branch))
            except (BranchError, ValueError):
                pair.append(math.nan)
        ok = all(math.isfinite(v) for v in pair)
        rows.append((float(y), pair[0], pair[1], int(ok)))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["y", "x_plus", "x_minus", "branch_ok"])
    for y, xp, xm, ok in rows:
        w.writerow([repr(float(y)), repr(float(xp)), repr(float(xm)), ok])
    return buf.getvalue()


def read_geodesic_csv(text: str) -> list[tuple]:
    rd = csv.DictReader(io.StringIO(text))
    return [(float(r["y"]), float(r["x_plus"]), float(r["x_minus"]), int(r["branch_ok"])) for r in rd]


def plot_script(csv_path: str, title: str) -> str:
    return "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        "set xlabel 'x'",
        "set ylabel 'y'",
        f"plot '{csv_path}' using 2:1 with lines title 'x_plus', \\",
        f"     '{csv_path}' using 3:1 with lines title 'x_minus'",
        "",
    ])


def cmd_geodesics(args) -> tuple[int, str]:
    p = _osc_params(args.n, args.delta)
    if args.C3 == 0 and not p.delta < 0:
        raise UsageError("C3 = 0 curves need delta < 0")
    if args.num < 2 or not args.ymax > args.ymin:
        raise UsageError("need ymax > ymin and at least 2 grid points")
    ys = np.linspace(args.ymin, args.ymax, args.num)
    rows = geodesic_rows(p, args.C3, args.C4, ys)
    if not any(r[3] for r in rows):
        raise UsageError("no admissible y in the requested range")
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.plot_script:
        src = args.out or "geodesics.csv"
        title = f"n={p.n}, delta={p.delta:g}, C3={args.C3:g}, C4={args.C4:g}"
        Path(args.plot_script).write_text(plot_script(src, title), encoding="utf-8")
    return 0, text


# -- classify ---------------------------------------------------------------------


def read_expression_file(path) -> dict[str, str]:
    """``name = expr`` per line; blank lines and ``#`` comments are skipped."""
    defs: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, expr = line.partition("=")
        name = name.strip()
        if not sep or name not in ("k", "h", "f", "g"):
            raise UsageError(f"{path}:{lineno}: expected 'k|h|f|g = expr'")
        defs[name] = expr.strip()
    return defs


def cmd_classify(args) -> tuple[int, dict]:
    defs = read_expression_file(args.file)
    try:
        spec = CubicOscSpec.parse(**defs)
    except ParseError as exc:
        raise UsageError(f"parse error: {exc}") from None
    lo, hi = args.interval
    rep = classify(spec, interval=(lo, hi))
    report = {"command": "classify", "coefficients": spec.to_dict(), **rep.to_dict()}
    if rep.case == "none":
        return 1, report
    try:
        sol = solve_psi(spec, rep.case, lo, hi)
        g = reconstruct_metric(sol.psi)
        ys = chebyshev_points(lo, hi, 16)
        rt = {**sol.report(), "round_trip_error": round_trip_error(spec, g, ys)}
        if args.samples:
            rt["metric_samples"] = [[float(y), *map(float, g.matrix(0.0, float(y))[[0, 0, 1], [0, 1, 1]])]
                                    for y in np.linspace(lo, hi, args.samples)]
    except (LiouvilleGateError, DegenerateSolution) as exc:
        rt = {"error": str(exc)}
    report["metric"] = rt
    return 0, report


# -- lienard ----------------------------------------------------------------------


def _family(args):
    fam = args.family
    if fam in ("duffing", "caseII"):
        return caseII_family(args.n, args.alpha, args.delta), THRESHOLDS["residual"]
    if fam == "caseIII":
        return caseIII_family(args.delta), THRESHOLDS["residual"]
    if fam == "dvdp":
        spec, pm, osc = dvdp_example(args.m, args.mu)
        if pm is None:
            raise UsageError(f"m={args.m} gives n=0: no point transformation")
        return (spec, pm, osc), THRESHOLDS["residual_dvdp"]
    raise UsageError(f"unknown family {fam}")


def cmd_lienard(args) -> tuple[int, dict]:
    if args.family == "duffing-shift":
        chk = duffing_shift(args.alpha, args.delta)
        return (0 if chk.exact else 1), {"command": "lienard", "family": "duffing-shift",
                                         **chk.to_dict(), "pass": chk.exact}
    try:
        (spec, pm, osc), res_tol = _family(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ics = list(args.ic or [])
    if args.random_ics:
        ics += _random_ics(args.seed, args.random_ics, 0.5, 1.0, -0.3, 0.3)
    if not ics:
        ics = [(0.5, 0.0)] if args.family != "dvdp" else [(1.0, 0.0)]
    cases, ok = [], True
    for w0, v0 in ics:
        r = verify_equivalence(spec, pm, osc, (0.0, w0, v0), args.span)
        r["ic"] = [w0, v0]
        excluded = r.pop("excluded_xi")
        r["J2_excluded_nodes"] = len(excluded)
        # a map defined on w > 0 only: running into w = 0 ends the check early, not a failure
        r["stopped_at_boundary"] = bool(pm.domain is not None and r["status"] != "success"
                                        and abs(r["w_end"]) < 1e-2 * r["w_max_abs"])
        passed = ((r["status"] == "success" or r["stopped_at_boundary"])
                  and r["max_equation_residual"] < res_tol
                  and r["J1_drift"] < THRESHOLDS["J1"] and r["J2_drift"] < THRESHOLDS["J2"])
        r["pass"] = passed
        ok &= passed
        cases.append(r)
    report = {"command": "lienard", "family": args.family, "spec": spec.to_dict(),
              "map": pm.to_dict(), "oscillator": {"n": osc.n, "delta": osc.delta},
              "residual_threshold": res_tol, "cases": cases, "pass": ok}
    return (0 if ok else 1), report


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="superosc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"superosc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0, help="seed for --random-ics")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")

    v = sub.add_parser("verify-integrals", help="conservation of the oscillator's first integrals")
    v.add_argument("--n", type=_rational, required=True)
    v.add_argument("--delta", type=float, required=True)
    v.add_argument("--ic", type=_pair, action="append", help="initial 'y,y_x' (repeatable)")
    v.add_argument("--random-ics", type=int, default=0)
    v.add_argument("--span", type=float, default=5.0)
    common(v)

    g = sub.add_parser("geodesics", help="CSV of the explicit geodesics x(y)")
    g.add_argument("--n", type=_rational, required=True)
    g.add_argument("--delta", type=float, required=True)
    g.add_argument("--C3", type=float, required=True)
    g.add_argument("--C4", type=float, default=0.0)
    g.add_argument("--ymin", type=float, default=0.0)
    g.add_argument("--ymax", type=float, default=1.0)
    g.add_argument("--num", type=int, default=101)
    g.add_argument("--out", help="CSV path (default stdout)")
    g.add_argument("--plot-script", help="also write a gnuplot script here")

    c = sub.add_parser("classify", help="metrisability case of y'' = k y'^3 + h y'^2 + f y' + g")
    c.add_argument("--file", required=True, help="lines 'name = expr' for k, h, f, g in y")
    c.add_argument("--interval", type=_pair, default=(0.5, 2.0))
    c.add_argument("--samples", type=int, default=0, help="reconstructed metric samples to include")
    common(c, seed=False)

    li = sub.add_parser("lienard", help="equivalence checks for Lienard families")
    li.add_argument("--family", required=True,
                    choices=["duffing", "caseII", "caseIII", "dvdp", "duffing-shift"])
    li.add_argument("--n", type=_rational, default=Fraction(3))
    li.add_argument("--alpha", type=_rational, default=Fraction(1))
    li.add_argument("--delta", type=_rational, default=Fraction(1))
    li.add_argument("--m", type=_rational, default=Fraction(2))
    li.add_argument("--mu", type=_rational, default=Fraction(1))
    li.add_argument("--ic", type=_pair, action="append", help="initial 'w,w_xi' (repeatable)")
    li.add_argument("--random-ics", type=int, default=0)
    li.add_argument("--span", type=float, default=5.0)
    common(li)
    return ap


COMMANDS = {
    "verify-integrals": cmd_verify_integrals,
    "geodesics": cmd_geodesics,
    "classify": cmd_classify,
    "lienard": cmd_lienard,
}


def main(argv=None) -> int:
    argv = preprocess_argv(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    try:
        code, result = COMMANDS[args.command](args)
    except (UsageError, OSError) as exc:
        sys.stderr.write(f"superosc {args.command}: error: {exc}\n")
        return 2
    if isinstance(result, dict):
        emit_json(result, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
