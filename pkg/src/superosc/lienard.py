"""Lienard equations w'' + f(w) w' + g(w) = 0 point-equivalent to the anharmonic oscillator.

A :class:`PointMap` ``y = F(xi, w), x = G(xi, w)`` carries solutions of a
:class:`LienardSpec` to solutions of ``y_xx + delta (n+1) y^n = 0``; the
oscillator integrals pulled back through it give :func:`J1` and :func:`J2`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .numkit import OdeProblem, Trajectory, integrate_ode
from .numkit.expr import (
    Expr,
    as_expr,
    const,
    diff_expr,
    exp,
    parse_expr,
    polynomial_identity,
    substitute,
    sym,
)
from .numkit.special import HypergeometricDomainError, PowerDomainError, real_power
from .oscillator import DegenerateBranch, I2, OscParams, PhaseState, as_fraction

__all__ = [
    "LienardSpec",
    "PointMap",
    "caseI_family",
    "caseI_coefficients",
    "caseII_family",
    "caseIII_family",
    "identity_family",
    "m_equation_residual",
    "m_equation_terms",
    "duffing",
    "duffing_shift",
    "ShiftCheck",
    "dvdp_M",
    "dvdp_example",
    "J1",
    "J2",
    "mapped_slope",
    "equation_residual",
    "integrate_lienard",
    "verify_equivalence",
    "autonomous_integral",
    "autonomy_drift",
    "EXCLUDED_N",
]

W, XI = sym("w"), sym("xi")
EXCLUDED_N = (Fraction(-3), Fraction(-1), Fraction(0), Fraction(1))


def _q(v):
    """Keep rationals exact, everything else float."""
    if isinstance(v, (int, Fraction, str)):
        return as_fraction(v)
    f = float(v)
    r = Fraction(f).limit_denominator(10_000)
    return r if float(r) == f else f


@dataclass(frozen=True)
class LienardSpec:
    """``w'' + f(w) w' + g(w) = 0`` with provenance ``tag`` and ``params``."""

    f: Expr
    g: Expr
    tag: str = ""
    params: dict = field(default_factory=dict)
    odd_roots: bool = False

    def __post_init__(self):
        object.__setattr__(self, "f", as_expr(self.f))
        object.__setattr__(self, "g", as_expr(self.g))
        for e in (self.f, self.g):
            if e.free_symbols - {"w"}:
                raise ValueError("Lienard coefficients may depend on w only")

    def fg(self, w: float) -> tuple[float, float]:
        env = {"w": w}
        return (float(self.f.evaluate(env, odd_roots=self.odd_roots)),
                float(self.g.evaluate(env, odd_roots=self.odd_roots)))

    def rhs(self, xi, z):
        w, v = z
        try:
            f, g = self.fg(w)
        except (PowerDomainError, ZeroDivisionError, OverflowError):
            # trial stage outside the real domain: the integrator shrinks the step
            return np.array([v, math.nan])
        return np.array([v, -f * v - g])

    def to_dict(self) -> dict:
        return {"f": str(self.f), "g": str(self.g), "tag": self.tag,
                "params": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.params.items()}}


class PointMap:
    """``y = F(xi, w)``, ``x = G(xi, w)`` with symbolic first and second partials."""

    def __init__(self, F, G, odd_roots: bool = False, domain=None):
        self.F = as_expr(F)
        self.G = as_expr(G)
        self.odd_roots = odd_roots
        self.domain = domain  # optional predicate on (xi, w)
        d = {}
        for name, e in (("F", self.F), ("G", self.G)):
            e_xi, e_w = diff_expr(e, "xi"), diff_expr(e, "w")
            d[name] = e
            d[name + "_xi"] = e_xi
            d[name + "_w"] = e_w
            d[name + "_xixi"] = diff_expr(e_xi, "xi")
            d[name + "_xiw"] = diff_expr(e_xi, "w")
            d[name + "_ww"] = diff_expr(e_w, "w")
        self._d = d

    def partials(self, xi: float, w: float) -> dict:
        env = {"xi": xi, "w": w}
        return {k: float(e.evaluate(env, odd_roots=self.odd_roots)) for k, e in self._d.items()}

    def jacobian(self, xi: float, w: float) -> float:
        p = self.partials(xi, w)
        return p["F_xi"] * p["G_w"] - p["F_w"] * p["G_xi"]

    def to_dict(self) -> dict:
        return {"F": str(self.F), "G": str(self.G)}


# -- families ---------------------------------------------------------------------


def _check_n(n):
    n = as_fraction(n)
    if n in EXCLUDED_N:
        raise ValueError(f"n={n} is excluded (n must avoid -3, -1, 0, 1)")
    return n


def caseII_family(n, alpha, delta, odd_roots: bool = False) -> tuple[LienardSpec, PointMap, OscParams]:
    """``f = alpha``, ``g = 2(n+1) alpha^2 / (n+3)^2 w + delta w^n`` with its fiber-preserving map."""
    n = _check_n(n)
    alpha, delta = _q(alpha), _q(delta)
    if alpha == 0:
        raise ValueError("alpha = 0: g reduces to delta w^n and G = (n+3)/(alpha (n-1)) "
                         "exp(...) is singular, so the map degenerates")
    g = 2 * (n + 1) * const(alpha) ** 2 / (n + 3) ** 2 * W + delta * W ** n
    spec = LienardSpec(const(alpha), g, "II", {"n": n, "alpha": alpha, "delta": delta}, odd_roots)
    try:
        c2 = float(real_power(float(n + 1), -1 / (n - 1), odd_roots=True))
    except PowerDomainError as exc:
        raise ValueError(f"(n+1)^(-1/(n-1)) is not real for n={n}") from exc
    F = c2 * W * exp(2 * const(alpha) / (n + 3) * XI)
    G = (n + 3) / (const(alpha) * (n - 1)) * exp(-const(alpha) * (n - 1) / (n + 3) * XI)
    # w^n is only real for w > 0 unless n is an integer or odd roots are allowed
    domain = None if n.denominator == 1 or odd_roots else (lambda xi, w: w > 0)
    return spec, PointMap(F, G, odd_roots, domain=domain), OscParams(n, float(delta), odd_roots)


def caseIII_family(delta) -> tuple[LienardSpec, PointMap, OscParams]:
    """``f = 0``, ``g = -w - delta w^-3`` (n = -3), ``F = 2 e^xi w``, ``G = sqrt(2) e^(2 xi)``."""
    delta = _q(delta)
    if delta == 0:
        raise ValueError("delta must be non-zero")
    spec = LienardSpec(const(0), -W - delta * W ** -3, "III", {"n": Fraction(-3), "delta": delta})
    pm = PointMap(2 * exp(XI) * W, math.sqrt(2) * exp(2 * XI))
    return spec, pm, OscParams(-3, float(delta))


def identity_family(n, delta) -> tuple[LienardSpec, PointMap, OscParams]:
    """The oscillator itself (``f = 0``, ``g = delta (n+1) w^n``) with ``F = w``, ``G = xi``."""
    n = as_fraction(n)
    delta = _q(delta)
    spec = LienardSpec(const(0), delta * (n + 1) * W ** n, "identity", {"n": n, "delta": delta})
    return spec, PointMap(W, XI), OscParams(n, float(delta))


def _M_derivs(M: Expr):
    out = [as_expr(M)]
    for _ in range(4):
        out.append(diff_expr(out[-1], "w"))
    return out


def caseI_coefficients(M, C1, n) -> tuple[Expr, Expr]:
    """``f = 2 C1 n/(n-1) - 3 C1 M M_ww / (2 M_w^2)``,
    ``g = C1^2 (n+1) M / ((n-1) M_w) - C1^2 M^2 M_ww / (2 M_w^3)``."""
    n = as_fraction(n)
    C1 = _q(C1)
    M, Mw, Mww, _, _ = _M_derivs(parse_expr(M) if isinstance(M, str) else M)
    f = 2 * const(C1) * n / (n - 1) - 3 * const(C1) * M * Mww / (2 * Mw ** 2)
    g = (const(C1) ** 2 * (n + 1) * M / ((n - 1) * Mw)
         - const(C1) ** 2 * M ** 2 * Mww / (2 * Mw ** 3))
    return f, g


def caseI_family(M, C1, n, delta, *, radicand: str = "mw4",
                 odd_roots: bool = False) -> tuple[LienardSpec, PointMap, OscParams]:
    """General family built from a function ``M(w)``.

    The map is ``G = e^(C1 xi) M`` and
    ``F = (-e^(-2 C1 xi) (2 M_w M_www - 3 M_ww^2) / (4 n delta (n+1) M_w^4))^(1/(n-1))``.
    ``radicand="mw2"`` uses ``(e^(-2 C1 xi) (2 M_w M_www - 3 M_ww^2) / (4 n delta (n+1) M_w^2))^(1/(n-1))``
    instead, which does not carry solutions to solutions in general.  When
    ``M_ww = 0`` the radicand vanishes and the map degenerates (``F = 0``).
    """
    n = _check_n(n)
    C1, delta = _q(C1), _q(delta)
    if C1 == 0:
        raise ValueError("C1 must be non-zero")
    M = parse_expr(M) if isinstance(M, str) else as_expr(M)
    if M.free_symbols - {"w"}:
        raise ValueError("M may depend on w only")
    f, g = caseI_coefficients(M, C1, n)
    M0, Mw, Mww, Mwww, _ = _M_derivs(M)
    schwarz = 2 * Mw * Mwww - 3 * Mww ** 2
    if radicand not in ("mw4", "mw2"):
        raise ValueError("radicand must be 'mw4' or 'mw2'")
    if radicand == "mw2":
        rad = exp(-2 * const(C1) * XI) * schwarz / (4 * n * const(delta) * (n + 1) * Mw ** 2)
    else:
        rad = -exp(-2 * const(C1) * XI) * schwarz / (4 * n * const(delta) * (n + 1) * Mw ** 4)
    F = rad ** (1 / (n - 1))
    G = exp(const(C1) * XI) * M0
    spec = LienardSpec(f, g, "I", {"M": str(M), "C1": C1, "n": n, "delta": delta}, odd_roots)
    # w^n is only real for w > 0 unless n is an integer or odd roots are allowed
    domain = None if n.denominator == 1 or odd_roots else (lambda xi, w: w > 0)
    return spec, PointMap(F, G, odd_roots, domain=domain), OscParams(n, float(delta), odd_roots)


def m_equation_terms(M, n, w: float, square_order: int = 3) -> list[float]:
    """The four summands of the fourth-order condition on ``M`` at ``w``.

    The second summand is ``4 (n-1)^2 M M_w^2 (d^k M / dw^k)^2`` with
    ``k = square_order``.  With ``k = 3`` the condition holds for every ``M``
    whose family is equivalent to the oscillator; ``k = 2`` is the variant
    that does not.
    """
    if square_order not in (2, 3):
        raise ValueError("square_order must be 2 or 3")
    n = float(as_fraction(n))
    M = parse_expr(M) if isinstance(M, str) else as_expr(M)
    m0, m1, m2, m3, m4 = (float(e.evaluate({"w": w})) for e in _M_derivs(M))
    t1 = 4 * n * m1 ** 2 * (2 * n * m1 ** 2 + m0 * m2 + 2 * m1 ** 2 - n * m0 * m2) * m4
    t2 = 4 * (n - 1) ** 2 * m0 * m1 ** 2 * (m3 if square_order == 3 else m2) ** 2
    t3 = -4 * m2 * m1 * (14 * m1 ** 2 * n ** 2 - 3 * m0 * n ** 2 * m2 + 10 * m1 ** 2 * n
                         + 3 * m0 * m2) * m3
    t4 = 3 * (5 * n + 3) * m2 ** 3 * (4 * m1 ** 2 * n + m0 * m2 - n * m0 * m2)
    return [t1, t2, t3, t4]


def m_equation_residual(M, n, w: float, square_order: int = 3) -> float:
    """Value of the fourth-order condition on ``M`` at ``w`` (see :func:`m_equation_terms`)."""
    return float(sum(m_equation_terms(M, n, w, square_order)))


# -- Duffing examples ---------------------------------------------------------------------


def duffing(n, alpha, delta) -> LienardSpec:
    """``w'' + alpha w' + 2(n+1) alpha^2/(n+3)^2 w + delta w^n = 0``."""
    spec, _, _ = caseII_family(n, alpha, delta)
    return LienardSpec(spec.f, spec.g, "duffing", dict(spec.params))


@dataclass(frozen=True)
class ShiftCheck:
    spec: LienardSpec
    shift: object
    shifted_g: Expr
    target_g: Expr
    exact: bool

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "shift": str(self.shift),
                "shifted_g": str(self.shifted_g), "target_g": str(self.target_g),
                "exact_match": self.exact}


def duffing_shift(alpha, delta) -> ShiftCheck:
    """``w'' + alpha w' - 6 alpha^2/25 w + delta w^2 = 0`` and its shift ``w -> w + 6 alpha^2/(25 delta)``.

    ``exact`` reports whether the shifted restoring term equals the n = 2
    Duffing one identically (rational arithmetic when alpha, delta are rational).
    """
    alpha, delta = _q(alpha), _q(delta)
    g52 = -Fraction(6, 25) * const(alpha) ** 2 * W + delta * W ** 2
    spec = LienardSpec(const(alpha), g52, "duffing-shift", {"alpha": alpha, "delta": delta})
    s = 6 * const(alpha) ** 2 / (25 * const(delta))
    shifted = substitute(g52, "w", W + s)
    target = duffing(2, alpha, delta).g
    if isinstance(alpha, Fraction) and isinstance(delta, Fraction):
        exact = polynomial_identity(shifted, target, "w", 2)
    else:
        pts = (0.5, 1.0, 2.0)
        exact = all(abs(float(shifted.evaluate(w=p)) - float(target.evaluate(w=p)))
                    <= 1e-12 * max(1.0, abs(float(target.evaluate(w=p)))) for p in pts)
    shift = s.value if hasattr(s, "value") else s
    return ShiftCheck(spec, shift, shifted, target, exact)


def dvdp_M(m, mu) -> Expr:
    """``M = 1 + 3 mu (m+1) / (2 (m+2) w^m)``."""
    m, mu = as_fraction(m), _q(mu)
    return 1 + 3 * const(mu) * (m + 1) / (2 * (m + 2)) * W ** (-m)


def dvdp_example(m, mu, *, odd_roots: bool = False) -> tuple[LienardSpec, Optional[PointMap], OscParams]:
    """Damped family ``w'' + (w^m + mu) w' + 2/(9(m+1)) w^(2m+1) + mu/(m+2) w^(m+1) + (m+1) mu^2/(m+2)^2 w = 0``.

    Equivalent to the oscillator with ``n = (1-m)/(3m+1)`` and ``delta = -1``
    through ``F = (3 sqrt(2) mu m (m+1) / ((m+2)(3m+1) w^m))^((3m+1)/(2m)) e^(-mu (3m+1) xi / (2m+4))``,
    ``G = e^(-mu m xi/(m+2)) (3 mu (m+1) / (2 (m+2) w^m) + 1)``.  At ``m = 1``
    the exponent is ``n = 0`` and no map is returned.
    """
    m = as_fraction(m)
    mu = _q(mu)
    if m in (-1, -2, Fraction(-1, 3)) or m == 0:
        raise ValueError(f"m={m} is excluded")
    if mu == 0:
        raise ValueError("mu must be non-zero")
    n = (1 - m) / (3 * m + 1)
    mu_e = const(mu)
    f = W ** m + mu_e
    g = (Fraction(2) / (9 * (m + 1)) * W ** (2 * m + 1) + mu_e / (m + 2) * W ** (m + 1)
         + (m + 1) * mu_e ** 2 / (m + 2) ** 2 * W)
    spec = LienardSpec(f, g, "dvdp", {"m": m, "mu": mu, "n": n, "delta": -1.0,
                                      "C1": -m * mu_e.value / (m + 2) if isinstance(mu, Fraction)
                                      else -float(m) * mu / float(m + 2)}, odd_roots)
    if n in (0, 1):
        return spec, None, None
    base = 3 * math.sqrt(2) * mu_e * m * (m + 1) / ((m + 2) * (3 * m + 1)) * W ** (-m)
    F = base ** ((3 * m + 1) / (2 * m)) * exp(-mu_e * (3 * m + 1) / (2 * m + 4) * XI)
    G = exp(-mu_e * m / (m + 2) * XI) * (3 * mu_e * (m + 1) / (2 * (m + 2)) * W ** (-m) + 1)
    pm = PointMap(F, G, odd_roots, domain=lambda xi, w: w > 0)
    return spec, pm, OscParams(n, -1.0, odd_roots)


# -- pulled-back integrals ---------------------------------------------------------------


def mapped_slope(pm: PointMap, xi: float, w: float, v: float, parts: Optional[dict] = None) -> float:
    """``y_x = (F_xi + F_w w') / (G_xi + G_w w')``."""
    p = parts or pm.partials(xi, w)
    den = p["G_xi"] + p["G_w"] * v
    if den == 0:
        raise ZeroDivisionError("G_xi + G_w w' = 0: x is stationary along the curve")
    return (p["F_xi"] + p["F_w"] * v) / den


def J1(pm: PointMap, osc: OscParams, state) -> float:
    """``((F_xi + F_w w')/(G_xi + G_w w'))^2 + 2 delta F^(n+1)``."""
    xi, w, v = state
    p = pm.partials(xi, w)
    u = mapped_slope(pm, xi, w, v, p)
    return u * u + 2 * osc.delta * osc.pw(p["F"], osc.n + 1)


def J2(pm: PointMap, osc: OscParams, state) -> float:
    """``G - y_x F / J1 * 2F1(a, 1; c; 2 delta F^(n+1) / J1)``: the transcendental
    oscillator integral at ``(x, y, y_x) = (G, F, y_x)``."""
    xi, w, v = state
    p = pm.partials(xi, w)
    u = mapped_slope(pm, xi, w, v, p)
    return I2(osc, PhaseState(p["G"], p["F"], u))


def equation_residual(spec: LienardSpec, pm: PointMap, osc: OscParams, state) -> float:
    """Relative residual of ``y_xx + delta (n+1) y^n`` along the mapped curve at ``state``.

    ``y_xx = d(y_x)/d xi / (dx/d xi)`` by the chain rule with ``w''`` from the
    Lienard equation; normalized by ``max(1, |delta (n+1) y^n|, |y_xx|)``.
    """
    xi, w, v = state
    p = pm.partials(xi, w)
    f, g = spec.fg(w)
    a = -f * v - g
    N = p["F_xi"] + p["F_w"] * v
    D = p["G_xi"] + p["G_w"] * v
    dN = p["F_xixi"] + 2 * p["F_xiw"] * v + p["F_ww"] * v * v + p["F_w"] * a
    dD = p["G_xixi"] + 2 * p["G_xiw"] * v + p["G_ww"] * v * v + p["G_w"] * a
    if D == 0:
        raise ZeroDivisionError("dx/dxi = 0 along the curve")
    yxx = (dN * D - N * dD) / D ** 3
    force = osc.delta * float(osc.n + 1) * osc.pw(p["F"], osc.n)
    return abs(yxx + force) / max(1.0, abs(force), abs(yxx))


def integrate_lienard(spec: LienardSpec, ic, span: float, domain=None, **tol) -> Trajectory:
    """Integrate from ``ic = (xi0, w0, w0')`` over ``[xi0, xi0 + span]``."""
    xi0, w0, v0 = (float(c) for c in ic)
    dom = None if domain is None else (lambda t, z: domain(t, z[0]))
    return integrate_ode(OdeProblem(spec.rhs, np.array([w0, v0]), (xi0, xi0 + span), domain=dom, **tol))


def _rel_drift(vals) -> float:
    v = np.asarray(vals, dtype=float)
    if v.size == 0:
        return 0.0
    return float(np.ptp(v) / max(1.0, float(np.max(np.abs(v)))))


def verify_equivalence(spec: LienardSpec, pm: PointMap, osc: OscParams, ic, span: float,
                       domain=None, **tol) -> dict:
    """Integrate the Lienard equation and check the map along the solution.

    Reports the integration status, the maximal equation residual, the minimal ``|Jacobian|``, the
    relative drifts of ``J1`` and ``J2`` (``J2`` per arc of constant
    ``sign(y_x)``), and nodes excluded because ``J2`` left its real branch.
    ``domain`` (a predicate on ``(xi, w)``) defaults to the map's own; the
    run stops where it fails and ``status`` records that.
    """
    domain = domain if domain is not None else pm.domain
    tol.setdefault("rtol", 1e-12)
    tol.setdefault("atol", 1e-14)
    traj = integrate_lienard(spec, ic, span, domain, **tol)
    residual = 0.0
    min_jac = math.inf
    j1, j2, slopes, excluded = [], [], [], []
    for xi, (w, v) in zip(traj.t, traj.y):
        st = (xi, w, v)
        residual = max(residual, equation_residual(spec, pm, osc, st))
        min_jac = min(min_jac, abs(pm.jacobian(xi, w)))
        j1.append(J1(pm, osc, st))
        u = mapped_slope(pm, xi, w, v)
        try:
            j2.append(J2(pm, osc, st))
            slopes.append(u)
        except (HypergeometricDomainError, DegenerateBranch):
            excluded.append(float(xi))
    arcs = _arcs(j2, slopes)
    return {
        "family": spec.tag,
        "params": spec.to_dict()["params"],
        "status": traj.status,
        "xi_end": traj.t_end,
        "nodes": int(len(traj.t)),
        "w_end": float(traj.y[-1, 0]),
        "w_max_abs": float(np.max(np.abs(traj.y[:, 0]))),
        "max_equation_residual": residual,
        "min_abs_jacobian": min_jac,
        "J1_drift": _rel_drift(j1),
        "J2_drift": max((_rel_drift(a) for a in arcs), default=0.0),
        "J2_arcs": len(arcs),
        "excluded_xi": excluded,
    }


def _arcs(vals, slopes):
    out, cur, sign = [], [], 0
    for val, u in zip(vals, slopes):
        s = np.sign(u)
        if s == 0:
            continue
        if s != sign and cur:
            out.append(cur)
            cur = []
        sign = s
        cur.append(val)
    if cur:
        out.append(cur)
    return out


def autonomous_integral(pm: PointMap, osc: OscParams, state, level: float,
                        max_width: float = 50.0) -> float:
    """``J2(Xi, w, w')`` where ``Xi`` solves ``J1(Xi, w, w') = level``.

    The root nearest the state's own ``xi`` is bracketed by expanding
    symmetric windows; the result depends on ``(w, w')`` only.
    """
    xi, w, v = state
    fn = lambda s: J1(pm, osc, (s, w, v)) - level
    width = 0.25
    while width <= max_width:
        grid = np.linspace(xi - width, xi + width, 9)
        vals = []
        for s in grid:
            try:
                vals.append(fn(s))
            except (ValueError, ZeroDivisionError, OverflowError):
                vals.append(np.nan)
        vals = np.array(vals)
        order = np.argsort(np.abs(grid[:-1] + 0.5 * (grid[1] - grid[0]) - xi))
        for i in order:
            a, b = vals[i], vals[i + 1]
            if np.isfinite(a) and np.isfinite(b) and a * b <= 0:
                root = brentq(fn, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
                return J2(pm, osc, (root, w, v))
        width *= 2
    raise ValueError(f"no xi with J1 = {level} near xi={xi}")


def autonomy_drift(spec: LienardSpec, pm: PointMap, osc: OscParams, ic, span: float,
                   stride: int = 5, **tol) -> dict:
    """Relative drift of :func:`autonomous_integral` along a Lienard trajectory.

    The level is ``J1`` at ``xi0 + 0.3``; like ``J2`` the value is constant on
    each arc of constant ``sign(y_x)``, so the drift is the largest per-arc one.
    """
    tol.setdefault("rtol", 1e-12)
    tol.setdefault("atol", 1e-14)
    traj = integrate_lienard(spec, ic, span, pm.domain, **tol)
    xi0, w0, v0 = (float(c) for c in ic)
    level = J1(pm, osc, (xi0 + 0.3, w0, v0))
    vals, slopes, excluded = [], [], 0
    for xi, (w, v) in list(zip(traj.t, traj.y))[::stride]:
        try:
            vals.append(autonomous_integral(pm, osc, (xi, w, v), level))
        except (HypergeometricDomainError, DegenerateBranch):
            excluded += 1
            continue
        slopes.append(mapped_slope(pm, xi, w, v))
    arcs = _arcs(vals, slopes)
    return {"status": traj.status, "level": level, "samples": len(vals), "excluded": excluded,
            "arcs": len(arcs),
            "drift": max((_rel_drift(a) for a in arcs), default=0.0)}
