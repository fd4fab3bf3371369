"""Projective connections of 2D metrics, the Liouville system and autonomous cubic oscillators.

A metric ``g`` projects to ``y'' + a3 y'^3 + a2 y'^2 + a1 y' + a0 = 0`` with
``a3 = -G^1_22, a2 = G^2_22 - 2 G^1_12, a1 = 2 G^2_12 - G^1_11, a0 = G^2_11``.
The Liouville variables ``psi = Delta^2 (g11, g12, g22)`` with
``Delta = psi1 psi3 - psi2^2 = det(g)^(-1/3)`` satisfy a linear system in the
``a_i``.  For ``y'' + k y'^3 + h y'^2 + f y' + g = 0`` with coefficients
depending on ``y`` only, x-independent solutions exist in five cases which
:func:`classify` detects and :func:`solve_psi` integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .numkit import OdeProblem, integrate_ode
from .numkit.expr import Expr, as_expr, diff_expr, parse_expr

__all__ = [
    "MetricTensorField",
    "christoffel",
    "project",
    "PsiTriple",
    "psi_from_metric",
    "liouville_residual",
    "CubicOscSpec",
    "CaseReport",
    "classify",
    "chebyshev_points",
    "PsiSolution",
    "LiouvilleGateError",
    "DegenerateSolution",
    "solve_psi",
    "default_initial_values",
    "reconstruct_metric",
    "positive_definite",
    "round_trip_error",
    "metric_hamiltonian_flow",
    "conformal_metric",
    "canonical_check",
    "CASES",
]

CASES = ("III", "IV", "V", "II", "I")

_FD_H = 1e-4


def _fd_partials(fn, x, y, h=_FD_H):
    hx = h * max(1.0, abs(x))
    hy = h * max(1.0, abs(y))
    fx = (-fn(x + 2 * hx, y) + 8 * fn(x + hx, y) - 8 * fn(x - hx, y) + fn(x - 2 * hx, y)) / (12 * hx)
    fy = (-fn(x, y + 2 * hy) + 8 * fn(x, y + hy) - 8 * fn(x, y - hy) + fn(x, y - 2 * hy)) / (12 * hy)
    return float(fx), float(fy)


@dataclass(frozen=True)
class MetricTensorField:
    """Metric components as functions of ``(x, y)``.

    ``partials(x, y)`` returns ``((g11_x, g11_y), (g12_x, g12_y), (g22_x, g22_y))``;
    when omitted, fourth-order central differences are used.
    """

    g11: Callable[[float, float], float]
    g12: Callable[[float, float], float]
    g22: Callable[[float, float], float]
    partials: Optional[Callable] = None

    def matrix(self, x, y) -> np.ndarray:
        a, b, c = float(self.g11(x, y)), float(self.g12(x, y)), float(self.g22(x, y))
        return np.array([[a, b], [b, c]])

    def derivatives(self, x, y) -> np.ndarray:
        """``D[k]`` is the matrix of ``d g / d x^k`` (k = 0 for x, 1 for y)."""
        if self.partials is not None:
            (a_x, a_y), (b_x, b_y), (c_x, c_y) = self.partials(x, y)
        else:
            a_x, a_y = _fd_partials(self.g11, x, y)
            b_x, b_y = _fd_partials(self.g12, x, y)
            c_x, c_y = _fd_partials(self.g22, x, y)
        return np.array([[[a_x, b_x], [b_x, c_x]], [[a_y, b_y], [b_y, c_y]]], dtype=float)

    def det(self, x, y) -> float:
        return float(np.linalg.det(self.matrix(x, y)))


def christoffel(g: MetricTensorField, x: float, y: float) -> np.ndarray:
    """``G[i, j, k] = Gamma^i_jk`` of the Levi-Civita connection, symmetric in ``j, k``."""
    M = g.matrix(x, y)
    det = M[0, 0] * M[1, 1] - M[0, 1] ** 2
    if not abs(det) > 1e-300 or not math.isfinite(det):
        raise np.linalg.LinAlgError(f"singular metric at ({x}, {y})")
    inv = np.array([[M[1, 1], -M[0, 1]], [-M[0, 1], M[0, 0]]]) / det
    D = g.derivatives(x, y)  # D[k, a, b] = d g_ab / d x^k
    G = np.zeros((2, 2, 2))
    for j in range(2):
        for k in range(j, 2):
            low = np.array([D[k, j, l] + D[j, k, l] - D[l, j, k] for l in range(2)])
            for i in range(2):
                G[i, j, k] = 0.5 * float(inv[i] @ low)
                G[i, k, j] = G[i, j, k]
    return G


def project(g: MetricTensorField, x: float, y: float) -> tuple[float, float, float, float]:
    """Coefficients ``(a0, a1, a2, a3)`` of the projected cubic equation."""
    G = christoffel(g, x, y)
    a3 = -G[0, 1, 1]
    a2 = G[1, 1, 1] - 2 * G[0, 0, 1]
    a1 = 2 * G[1, 0, 1] - G[0, 0, 0]
    a0 = G[1, 0, 0]
    return float(a0), float(a1), float(a2), float(a3)


# -- Liouville variables -------------------------------------------------------------


@dataclass(frozen=True)
class PsiTriple:
    """``evaluate(x, y) -> (psi, dpsi)`` with ``psi`` of shape (3,) and ``dpsi[i] = (d/dx, d/dy)``."""

    evaluate: Callable[[float, float], tuple[np.ndarray, np.ndarray]]
    x_independent: bool = False

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def delta(self, x, y) -> float:
        p, _ = self.evaluate(x, y)
        return float(p[0] * p[2] - p[1] ** 2)

    @classmethod
    def constant(cls, psi1, psi2, psi3) -> "PsiTriple":
        vals = np.array([psi1, psi2, psi3], dtype=float)
        return cls(lambda x, y: (vals.copy(), np.zeros((3, 2))), True)

    @classmethod
    def from_functions(cls, psi1, psi2, psi3, partials=None, x_independent=False) -> "PsiTriple":
        fns = (psi1, psi2, psi3)

        def ev(x, y):
            vals = np.array([float(f(x, y)) for f in fns])
            if partials is not None:
                d = np.asarray(partials(x, y), dtype=float)
            else:
                d = np.array([_fd_partials(f, x, y) for f in fns])
            return vals, d

        return cls(ev, x_independent)


def psi_from_metric(g: MetricTensorField) -> PsiTriple:
    """``psi = det(g)^(-2/3) (g11, g12, g22)`` with chain-rule partials."""

    def ev(x, y):
        M = g.matrix(x, y)
        D = g.derivatives(x, y)
        det = M[0, 0] * M[1, 1] - M[0, 1] ** 2
        if not det > 0:
            raise ValueError(f"metric not positive-definite at ({x}, {y})")
        comps = np.array([M[0, 0], M[0, 1], M[1, 1]])
        s = det ** (-2.0 / 3.0)
        out = s * comps
        d = np.zeros((3, 2))
        for k in range(2):
            dk = np.array([D[k, 0, 0], D[k, 0, 1], D[k, 1, 1]])
            ddet = dk[0] * comps[2] + comps[0] * dk[2] - 2 * comps[1] * dk[1]
            d[:, k] = s * dk - (2.0 / 3.0) * s / det * ddet * comps
        return out, d

    return PsiTriple(ev)


def liouville_residual(a, psi: PsiTriple, x: float, y: float) -> np.ndarray:
    """Residuals of the four Liouville equations at ``(x, y)``.

    ``a`` is either a constant quadruple ``(a0, a1, a2, a3)`` or a callable
    ``a(x, y)`` returning one.
    """
    a0, a1, a2, a3 = (a(x, y) if callable(a) else a)
    (p1, p2, p3), d = psi(x, y)
    return np.array([
        d[0, 0] + 2 / 3 * a1 * p1 - 2 * a0 * p2,
        d[2, 1] + 2 * a3 * p2 - 2 / 3 * a2 * p3,
        d[0, 1] + 2 * d[1, 0] + 4 / 3 * a2 * p1 - 2 / 3 * a1 * p2 - 2 * a0 * p3,
        d[2, 0] + 2 * d[1, 1] + 2 * a3 * p1 - 4 / 3 * a1 * p3 + 2 / 3 * a2 * p2,
    ])


# -- autonomous cubic oscillators ---------------------------------------------------


@dataclass(frozen=True)
class CubicOscSpec:
    """``y'' + k(y) y'^3 + h(y) y'^2 + f(y) y' + g(y) = 0`` with expression coefficients in ``y``."""

    k: Expr
    h: Expr
    f: Expr
    g: Expr
    var: str = "y"
    odd_roots: bool = False
    _derivs: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("k", "h", "f", "g"):
            e = as_expr(getattr(self, name))
            object.__setattr__(self, name, e)
            extra = e.free_symbols - {self.var}
            if extra:
                raise ValueError(f"{name} depends on {sorted(extra)}; only {self.var!r} is allowed")
        d = {}
        for name in ("k", "h", "f", "g"):
            e1 = diff_expr(getattr(self, name), self.var)
            d[name + "_y"] = e1
            d[name + "_yy"] = diff_expr(e1, self.var)
        object.__setattr__(self, "_derivs", d)
        if all(isinstance(getattr(self, n), Expr) and str(getattr(self, n)) == "0" for n in "khfg"):
            raise ValueError("all four coefficients vanish identically")

    @classmethod
    def parse(cls, k="0", h="0", f="0", g="0", var="y", odd_roots=False) -> "CubicOscSpec":
        return cls(parse_expr(str(k)), parse_expr(str(h)), parse_expr(str(f)), parse_expr(str(g)),
                   var, odd_roots)

    def expr(self, name: str) -> Expr:
        if name in ("k", "h", "f", "g"):
            return getattr(self, name)
        return self._derivs[name]

    def value(self, name: str, y: float) -> float:
        return float(self.expr(name).evaluate({self.var: y}, odd_roots=self.odd_roots))

    def values(self, y: float) -> dict:
        return {name: self.value(name, y)
                for name in ("k", "h", "f", "g", "k_y", "h_y", "f_y", "g_y", "k_yy", "h_yy")}

    def coefficients(self, x: float, y: float) -> tuple[float, float, float, float]:
        """``(a0, a1, a2, a3) = (g, f, h, k)``."""
        v = self.values(y)
        return v["g"], v["f"], v["h"], v["k"]

    def to_dict(self) -> dict:
        return {n: str(getattr(self, n)) for n in ("k", "h", "f", "g")}


def chebyshev_points(lo: float, hi: float, num: int = 64) -> np.ndarray:
    j = np.arange(num)
    t = np.cos(np.pi * (j + 0.5) / num)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t[::-1]


@dataclass
class CaseReport:
    case: str
    residuals: dict
    side_conditions: dict
    samples: int

    def to_dict(self) -> dict:
        return {"case": self.case, "residuals": self.residuals,
                "side_conditions": self.side_conditions, "samples": self.samples}


def _case_measures(v: dict) -> dict:
    """Normalized relation residuals and non-vanishing margins per case at one point."""
    k, h, f, g, f_y, g_y = v["k"], v["h"], v["f"], v["g"], v["f_y"], v["g_y"]
    scale = max(1.0, abs(k), abs(h), abs(f), abs(g))
    t1 = (27 * k * g * g, -9 * h * f * g, 2 * f ** 3, 9 * g * f_y, -9 * f * g_y)
    t2 = t1[1:]
    rel = lambda ts: abs(sum(ts)) / max(sum(abs(t) for t in ts), 1e-300)
    zero = lambda *xs: max(abs(x) for x in xs) / scale
    nz = lambda x: abs(x) / scale
    return {
        "III": (zero(k, f), nz(g)),
        "IV": (zero(f, g), nz(k)),
        "V": (zero(f, g, k), nz(h)),
        "II": (max(rel(t2), zero(k)), min(nz(f), nz(g))),
        "I": (rel(t1), min(nz(f), nz(k))),
    }


def classify(c: CubicOscSpec, y_samples: Optional[Sequence[float]] = None, interval=(0.5, 2.0),
             tol: float = 1e-9) -> CaseReport:
    """First case in the order III, IV, V, II, I whose relation holds at every sample.

    A case matches when its normalized residual is below ``tol`` at all
    samples and each quantity that must not vanish exceeds ``tol`` (relative
    to the coefficient scale) at all samples.  Case II additionally requires
    ``k = 0``, which its Liouville solution needs.  Default samples: 64
    Chebyshev points on ``interval``.
    """
    ys = chebyshev_points(*interval) if y_samples is None else np.asarray(y_samples, float)
    worst_res = {name: 0.0 for name in CASES}
    worst_side = {name: math.inf for name in CASES}
    for y in ys:
        try:
            v = c.values(float(y))
        except (ValueError, ZeroDivisionError, KeyError) as exc:
            raise ValueError(f"coefficients not evaluable at y={y}: {exc}") from exc
        if not all(math.isfinite(t) for t in v.values()):
            raise ValueError(f"non-finite coefficient at y={y}")
        for name, (res, side) in _case_measures(v).items():
            worst_res[name] = max(worst_res[name], res)
            worst_side[name] = min(worst_side[name], side)
    case = "none"
    for name in CASES:
        if worst_res[name] < tol and worst_side[name] > tol:
            case = name
            break
    return CaseReport(case, worst_res, worst_side, len(ys))


# -- solving the x-independent Liouville system ---------------------------------------


class LiouvilleGateError(RuntimeError):
    """The integrated psi does not satisfy the Liouville system within tolerance."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class DegenerateSolution(ValueError):
    """``Delta = psi1 psi3 - psi2^2`` vanishes on the interval."""


def _case_system(c: CubicOscSpec, case: str):
    """``(state -> psi, rhs, derivative map)`` for a case's ODE in ``y``."""
    val = c.values

    if case == "III":
        def rhs(y, s):
            v = val(y)
            p1, p3 = s
            return np.array([2 * v["g"] * p3 - 4 * v["h"] * p1 / 3, 2 * v["h"] * p3 / 3])

        def psi(y, s):
            d = rhs(y, s)
            return np.array([s[0], 0.0, s[1]]), np.array([d[0], 0.0, d[1]])
    elif case == "IV":
        def rhs(y, s):
            v = val(y)
            p1, p2, p3 = s
            return np.array([-4 * v["h"] * p1 / 3, -v["k"] * p1 - v["h"] * p2 / 3,
                             2 * v["h"] * p3 / 3 - 2 * v["k"] * p2])

        def psi(y, s):
            return np.array(s, dtype=float), rhs(y, s)
    elif case == "V":
        def rhs(y, s):
            h = val(y)["h"]
            return np.array([-4 * h * s[0] / 3, -h * s[1] / 3, 2 * h * s[2] / 3])

        def psi(y, s):
            return np.array(s, dtype=float), rhs(y, s)
    elif case == "II":
        def rhs(y, s):
            v = val(y)
            p2, p3 = s
            return np.array([(2 * v["f"] * p3 - v["h"] * p2) / 3, 2 * v["h"] * p3 / 3])

        def psi(y, s):
            v = val(y)
            d2, d3 = rhs(y, s)
            p2 = s[0]
            p1 = 3 * v["g"] * p2 / v["f"]
            d1 = 3 * (v["g_y"] * p2 + v["g"] * d2) / v["f"] - 3 * v["g"] * p2 * v["f_y"] / v["f"] ** 2
            return np.array([p1, p2, s[1]]), np.array([d1, d2, d3])
    elif case == "I":
        def second(v, p3, q3):
            k, h, f, g = v["k"], v["h"], v["f"], v["g"]
            B = f * h * k - 9 * g * k * k + 3 * f * v["k_y"]
            lin = 2 * k * f * h * h - 6 * f * f * k * k + 3 * k * f * v["h_y"] - B * h
            return (3 * B * q3 + 2 * lin * p3) / (9 * f * k)

        def rhs(y, s):
            return np.array([s[1], second(val(y), s[0], s[1])])

        def psi(y, s):
            v = val(y)
            k, h, f, g = v["k"], v["h"], v["f"], v["g"]
            p3, q3 = s
            r3 = second(v, p3, q3)
            num = 2 * h * p3 - 3 * q3
            dnum = 2 * v["h_y"] * p3 + 2 * h * q3 - 3 * r3
            p2 = num / (6 * k)
            d2 = dnum / (6 * k) - num * v["k_y"] / (6 * k * k)
            p1 = 3 * g * p2 / f
            d1 = 3 * (v["g_y"] * p2 + g * d2) / f - 3 * g * p2 * v["f_y"] / f ** 2
            return np.array([p1, p2, p3]), np.array([d1, d2, q3])
    else:
        raise ValueError(f"unknown case {case!r}")
    return rhs, psi


def default_initial_values(case: str) -> tuple:
    """Generic initial data: ``(psi1, psi3)`` for III, ``(psi2, psi3)`` for II,
    ``(psi1, psi2, psi3)`` for IV and V, ``(psi3, psi3')`` for I."""
    return {"III": (1.0, 1.0), "IV": (1.0, 0.0, 1.0), "V": (1.0, 0.0, 1.0),
            "II": (1.0, 1.0), "I": (1.0, 0.0)}[case]


@dataclass
class PsiSolution:
    psi: PsiTriple
    case: str
    interval: tuple
    max_residual: float
    min_abs_delta: float
    grid: np.ndarray

    def report(self) -> dict:
        return {"case": self.case, "interval": list(self.interval),
                "max_liouville_residual": self.max_residual,
                "min_abs_delta": self.min_abs_delta}


def solve_psi(c: CubicOscSpec, case: str, y0: float, y1: float, init=None, *,
              gate: float = 1e-7, rtol: float = 1e-12, atol: float = 1e-14,
              check_points: int = 64) -> PsiSolution:
    """Integrate the case's ODE system for ``psi(y)`` on ``[y0, y1]`` from ``init`` at ``y0``.

    The result is accepted only if the full Liouville system holds to
    ``gate`` (relative to the size of ``psi`` and its derivative) at
    ``check_points`` Chebyshev points plus both ends and ``Delta`` stays away from zero;
    otherwise :class:`LiouvilleGateError` or :class:`DegenerateSolution` is
    raised.
    """
    rhs, to_psi = _case_system(c, case)
    s0 = np.array(default_initial_values(case) if init is None else init, dtype=float)
    traj = integrate_ode(OdeProblem(rhs, s0, (y0, y1), rtol=rtol, atol=atol))
    if not traj.success:
        raise DegenerateSolution(f"integration of the {case} system failed: {traj.message}")
    lo, hi = min(y0, y1), max(y0, y1)

    def ev(x, y):
        if not (lo - 1e-12 <= y <= hi + 1e-12):
            raise ValueError(f"y={y} outside the solved interval [{lo}, {hi}]")
        p, d = to_psi(y, traj(y))
        return p, np.column_stack([np.zeros(3), d])

    psi = PsiTriple(ev, x_independent=True)
    ys = np.concatenate(([lo], chebyshev_points(lo, hi, check_points), [hi]))
    worst = 0.0
    min_delta = math.inf
    for y in ys:
        p, d = ev(0.0, y)
        delta = p[0] * p[2] - p[1] ** 2
        min_delta = min(min_delta, abs(delta) / max(1.0, float(np.max(np.abs(p)))) ** 2)
        r = liouville_residual(c.coefficients, psi, 0.0, y)
        size = max(1.0, float(np.max(np.abs(p))), float(np.max(np.abs(d))))
        worst = max(worst, float(np.max(np.abs(r))) / size)
    sol = PsiSolution(psi, case, (y0, y1), worst, min_delta, ys)
    if not min_delta > 1e-10:
        raise DegenerateSolution(f"Delta vanishes on [{lo}, {hi}] (min |Delta| = {min_delta:.3e})")
    if not worst < gate:
        raise LiouvilleGateError(
            f"case {case}: Liouville residual {worst:.3e} exceeds gate {gate:.1e}", sol.report())
    return sol


def reconstruct_metric(psi: PsiTriple) -> MetricTensorField:
    """``g = (psi1, psi2, psi3) / Delta^2`` with chain-rule partials."""

    def parts(x, y):
        p, d = psi(x, y)
        delta = p[0] * p[2] - p[1] ** 2
        if delta == 0:
            raise DegenerateSolution(f"Delta = 0 at ({x}, {y})")
        out = []
        for i in range(3):
            row = []
            for k in range(2):
                dd = d[0, k] * p[2] + p[0] * d[2, k] - 2 * p[1] * d[1, k]
                row.append(d[i, k] / delta ** 2 - 2 * p[i] * dd / delta ** 3)
            out.append(tuple(row))
        return tuple(out)

    def comp(i):
        def fn(x, y):
            p, _ = psi(x, y)
            delta = p[0] * p[2] - p[1] ** 2
            if delta == 0:
                raise DegenerateSolution(f"Delta = 0 at ({x}, {y})")
            return p[i] / delta ** 2
        return fn

    return MetricTensorField(comp(0), comp(1), comp(2), parts)


def positive_definite(g: MetricTensorField, points) -> list[bool]:
    return [bool(g.g11(x, y) > 0 and g.det(x, y) > 0) for x, y in points]


def round_trip_error(c: CubicOscSpec, g: MetricTensorField, ys, x: float = 0.0) -> float:
    """Largest ``|project(g) - (g, f, h, k)|`` relative to ``max(1, |coefficients|)``."""
    worst = 0.0
    for y in ys:
        want = np.array(c.coefficients(x, y))
        got = np.array(project(g, x, float(y)))
        worst = max(worst, float(np.max(np.abs(got - want))) / max(1.0, float(np.max(np.abs(want)))))
    return worst


# -- generic geodesic flow and the conformal canonical form -----------------------------


def metric_hamiltonian_flow(g: MetricTensorField, s0, span: float, **tol):
    """Geodesic flow of ``H = g^ij p_i p_j / 2``; state ``(x, y, p1, p2)``."""

    def rhs(t, z):
        x, y, p1, p2 = z
        M = g.matrix(x, y)
        inv = np.linalg.inv(M)
        p = np.array([p1, p2])
        w = inv @ p
        D = g.derivatives(x, y)
        dH = [-0.5 * float(w @ D[k] @ w) for k in range(2)]
        return np.array([w[0], w[1], -dH[0], -dH[1]])

    return integrate_ode(OdeProblem(rhs, np.asarray(s0, dtype=float), (0.0, float(span)), **tol))


def conformal_metric(lam: Expr, var: str = "y") -> MetricTensorField:
    """``lambda(y) (dx^2 + dy^2)`` with exact partials."""
    lam = as_expr(lam)
    dlam = diff_expr(lam, var)
    L = lambda y: float(lam.evaluate({var: y}))
    Ly = lambda y: float(dlam.evaluate({var: y}))
    return MetricTensorField(
        lambda x, y: L(y), lambda x, y: 0.0, lambda x, y: L(y),
        lambda x, y: ((0.0, Ly(y)), (0.0, 0.0), (0.0, Ly(y))),
    )


def canonical_check(lam, interval=(0.5, 2.0), samples: int = 16, flow_state=None,
                    span: float = 2.0) -> dict:
    """Check the conformal form ``lambda(y)(dx^2 + dy^2)``.

    Compares ``project`` with ``a0 = a2 = -lambda_y / (2 lambda)``,
    ``a1 = a3 = 0`` on ``samples`` points and integrates
    ``H = (p1^2 + p2^2) / (2 lambda)`` to measure the drifts of ``p1`` and ``H``.
    """
    lam = parse_expr(lam) if isinstance(lam, str) else lam
    dlam = diff_expr(lam, "y")
    ys = chebyshev_points(*interval, samples)
    for y in ys:
        if not float(lam.evaluate(y=y)) > 0:
            raise ValueError(f"lambda({y}) <= 0")
    g = conformal_metric(lam)
    worst = 0.0
    for y in ys:
        q = -float(dlam.evaluate(y=y)) / (2 * float(lam.evaluate(y=y)))
        got = np.array(project(g, 0.0, float(y)))
        worst = max(worst, float(np.max(np.abs(got - np.array([q, 0.0, q, 0.0])))))
    mid = 0.5 * (interval[0] + interval[1])
    s0 = flow_state if flow_state is not None else (0.0, mid, 0.3, 0.1)
    lo, hi = interval
    traj = integrate_ode(OdeProblem(
        _conformal_rhs(lam, dlam), np.asarray(s0, float), (0.0, span), rtol=1e-12, atol=1e-14,
        domain=lambda t, z: lo <= z[1] <= hi))
    Hs = [(z[2] ** 2 + z[3] ** 2) / (2 * float(lam.evaluate(y=z[1]))) for z in traj.y]
    return {
        "projection_error": worst,
        "p1_drift": float(np.ptp(traj.y[:, 2])),
        "H_drift": float(np.ptp(Hs)),
        "flow_status": traj.status,
        "flow_end": traj.t_end,
    }


def _conformal_rhs(lam: Expr, dlam: Expr):
    def rhs(t, z):
        x, y, p1, p2 = z
        L = float(lam.evaluate(y=y))
        Ly = float(dlam.evaluate(y=y))
        e = p1 * p1 + p2 * p2
        return np.array([p1 / L, p2 / L, 0.0, e * Ly / (2 * L * L)])
    return rhs
