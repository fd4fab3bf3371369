"""Geodesic flow of the x-independent metric attached to the anharmonic oscillator.

With ``A(y) = 2 C1 delta y^(n+1) + C2`` (``2 C1 delta ln y + C2`` on the
logarithmic branch ``n = -1``) the metric is::

    ds^2 = (A dx^2 + C1 dy^2) / (C1^2 A^2)

and the Hamiltonian used for all integral checks is
``H = scale * A * (C1 p1^2 / 2 + A p2^2 / 2)`` where ``scale = 1`` on the
power branch and ``scale = C1`` on the logarithmic branch.  ``scale = C1`` is
exactly ``g^ij p_i p_j / 2``; the power-branch convention differs from it by
the constant ``C1`` (a time rescaling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .numkit import OdeProblem, Trajectory, fd_gradient, integrate_ode
from .numkit.expr import Expr, const, sym
from .oscillator import (
    N2,
    OscParams,
    PhaseState,
    I2,
    as_fraction,
    poly_coefficients,
    poly_exponent,
)

__all__ = [
    "MetricSpec",
    "CoState",
    "n_minus1_metric",
    "hamiltonian",
    "hamiltonian_gradient",
    "metric_hamiltonian",
    "geodesic_flow",
    "slope",
    "integral_L",
    "integral_R",
    "integral_R_gradient",
    "integral_T",
    "integral_Tk",
    "lifted_N2",
    "Tk_expr",
    "hamiltonian_expr",
    "T1_expr",
    "T1_y23_expr",
    "T2_expr",
    "H_quartic_expr",
    "H_sextic_expr",
    "H_sextic_y43_expr",
    "solve_sextic_coefficient",
    "curvature",
    "brioschi_curvature",
    "poisson_bracket",
    "normalized_bracket",
    "jacobi_singular_values",
    "momentum_degree",
    "PHASE_SYMBOLS",
]

PHASE_SYMBOLS = ("x", "y", "p1", "p2")


class CoState(NamedTuple):
    x: float
    y: float
    p1: float
    p2: float


@dataclass(frozen=True)
class MetricSpec:
    """Metric ``(A dx^2 + C1 dy^2) / (C1^2 A^2)``; ``kind`` is ``"power"`` or ``"log"``."""

    C1: float
    C2: float
    osc: OscParams
    kind: str = "power"

    def __post_init__(self):
        if self.C1 == 0:
            raise ValueError("C1 must be non-zero")
        if self.kind not in ("power", "log"):
            raise ValueError("kind must be 'power' or 'log'")
        if (self.kind == "log") != self.osc.is_log:
            raise ValueError("the logarithmic metric belongs to n = -1 and only there")
        object.__setattr__(self, "C1", float(self.C1))
        object.__setattr__(self, "C2", float(self.C2))

    @classmethod
    def power(cls, C1, C2, n, delta, odd_roots=False) -> "MetricSpec":
        return cls(C1, C2, OscParams(n, delta, odd_roots))

    @property
    def scale(self) -> float:
        return self.C1 if self.kind == "log" else 1.0

    @property
    def n(self) -> Fraction:
        return self.osc.n

    @property
    def delta(self) -> float:
        return self.osc.delta

    def P(self, y):
        """``2 delta y^(n+1)`` (``2 delta ln y`` on the log branch)."""
        if self.kind == "log":
            return 2 * self.delta * np.log(y)
        return 2 * self.delta * self.osc.pw(y, self.n + 1)

    def P_y(self, y):
        if self.kind == "log":
            return 2 * self.delta / y
        return 2 * self.delta * float(self.n + 1) * self.osc.pw(y, self.n)

    def A(self, y):
        return self.C1 * self.P(y) + self.C2

    def A_y(self, y):
        return self.C1 * self.P_y(y)

    def g11(self, y):
        return 1.0 / (self.C1 ** 2 * self.A(y))

    def g22(self, y):
        return 1.0 / (self.C1 * self.A(y) ** 2)

    def g11_y(self, y):
        return -self.A_y(y) / (self.C1 ** 2 * self.A(y) ** 2)

    def g22_y(self, y):
        return -2 * self.A_y(y) / (self.C1 * self.A(y) ** 3)

    def in_domain(self, y) -> bool:
        """Positive-definite at ``y``: ``A(y) > 0`` and ``C1 > 0``."""
        if not self.osc.in_domain(y) or (self.kind == "log" and not y > 0):
            return False
        return self.C1 > 0 and float(self.A(y)) > 0

    def tensor_field(self):
        """The metric as a :class:`~superosc.metrisability.MetricTensorField`."""
        from .metrisability import MetricTensorField

        return MetricTensorField(
            g11=lambda x, y: self.g11(y),
            g12=lambda x, y: 0.0,
            g22=lambda x, y: self.g22(y),
            partials=lambda x, y: ((0.0, self.g11_y(y)), (0.0, 0.0), (0.0, self.g22_y(y))),
        )


def n_minus1_metric(C1: float, C2: float, delta: float) -> MetricSpec:
    """Logarithmic metric ``A = 2 delta C1 ln y + C2`` for ``y'' + delta / y = 0``."""
    return MetricSpec(C1, C2, OscParams(-1, delta), kind="log")


def _check(m: MetricSpec, s: CoState):
    if not m.in_domain(s.y):
        raise ValueError(f"y={s.y} outside the positive-definite domain of the metric")


def hamiltonian(m: MetricSpec, s: CoState) -> float:
    """``scale * A (C1 p1^2 / 2 + A p2^2 / 2)``."""
    _check(m, s)
    A = m.A(s.y)
    return m.scale * A * (m.C1 * s.p1 ** 2 / 2 + A * s.p2 ** 2 / 2)


def metric_hamiltonian(m: MetricSpec, s: CoState) -> float:
    """``g^ij p_i p_j / 2`` computed from the inverse of the metric tensor."""
    _check(m, s)
    return 0.5 * (s.p1 ** 2 / m.g11(s.y) + s.p2 ** 2 / m.g22(s.y))


def hamiltonian_gradient(m: MetricSpec, s: CoState) -> np.ndarray:
    """Analytic ``(H_x, H_y, H_p1, H_p2)``."""
    A = m.A(s.y)
    Ay = m.A_y(s.y)
    c = m.scale
    return np.array([
        0.0,
        c * Ay * (m.C1 * s.p1 ** 2 / 2 + A * s.p2 ** 2),
        c * m.C1 * A * s.p1,
        c * A ** 2 * s.p2,
    ])


def geodesic_flow(m: MetricSpec, s0: CoState, span: float, **tol) -> Trajectory:
    """Hamilton's equations ``q' = H_p, p' = -H_q``; state columns ``(x, y, p1, p2)``."""
    _check(m, s0)

    def rhs(t, z):
        g = hamiltonian_gradient(m, CoState(*z))
        return np.array([g[2], g[3], -g[0], -g[1]])

    problem = OdeProblem(rhs, np.array(s0, dtype=float), (0.0, float(span)),
                         domain=lambda t, z: m.in_domain(z[1]), **tol)
    return integrate_ode(problem)


def slope(m: MetricSpec, s: CoState) -> float:
    """Projected slope ``y_x = H_p2 / H_p1 = A p2 / (C1 p1)``."""
    if s.p1 == 0:
        raise ZeroDivisionError("p1 = 0: the projection is vertical")
    return m.A(s.y) * s.p2 / (m.C1 * s.p1)


# -- first integrals -------------------------------------------------------------


def integral_L(s: CoState) -> float:
    return s.p1


def integral_R(m: MetricSpec, s: CoState) -> float:
    """``A^2 / C1^2 * p2^2 / p1^2 + 2 delta y^(n+1)``."""
    if s.p1 == 0:
        raise ZeroDivisionError("R needs p1 != 0")
    _check(m, s)
    return m.A(s.y) ** 2 / m.C1 ** 2 * s.p2 ** 2 / s.p1 ** 2 + m.P(s.y)


def integral_R_gradient(m: MetricSpec, s: CoState) -> np.ndarray:
    A, Ay = m.A(s.y), m.A_y(s.y)
    q = s.p2 ** 2 / (m.C1 ** 2 * s.p1 ** 2)
    return np.array([
        0.0,
        2 * A * Ay * q + m.P_y(s.y),
        -2 * A ** 2 * q / s.p1,
        2 * A ** 2 * s.p2 / (m.C1 ** 2 * s.p1 ** 2),
    ])


def integral_T(m: MetricSpec, s: CoState) -> float:
    """Lift of the transcendental oscillator integral.

    With ``v = (1 + C2 / (2 C1 delta y^(n+1))) p2 / p1``,
    ``T = x - y v / (1 + P v^2) * 2F1(a, 1; c; 1 / (1 + P v^2))``, ``P = 2 delta y^(n+1)``.
    Since ``y_x = P v`` this is the oscillator integral at slope ``P v``,
    evaluated through :func:`~superosc.oscillator.I2` for accurate branch handling.
    """
    if m.kind == "log":
        raise ValueError("n = -1: use lifted_N2")
    if s.p1 == 0:
        raise ZeroDivisionError("T needs p1 != 0")
    _check(m, s)
    P = m.P(s.y)
    if s.p2 == 0:
        return float(s.x)
    v = (1 + m.C2 / (m.C1 * P)) * s.p2 / s.p1
    return I2(m.osc, PhaseState(s.x, s.y, P * v))


def lifted_N2(m: MetricSpec, s: CoState) -> float:
    """``N2`` evaluated at the projected slope (logarithmic branch)."""
    if m.kind != "log":
        raise ValueError("lifted_N2 belongs to the n = -1 metric")
    _check(m, s)
    return N2(PhaseState(s.x, s.y, slope(m, s)), m.delta)


def integral_Tk(m: MetricSpec, k: int, s: CoState) -> float:
    """Polynomial integral of degree ``2k+2`` in the momenta at ``n = -(2k+3)/(2k+1)``.

    ``(vt^2 + P p1^2)^(k+1) x - y vt sum_s c_s y^(-2s/(2k+1)) (vt^2 + P p1^2)^(k-s) p1^(2s+1)``
    with ``vt = (C2/C1 + P) p2`` and ``P = 2 delta y^(-2/(2k+1))``.
    """
    if m.n != poly_exponent(k):
        raise ValueError(f"n={m.n} does not match k={k}")
    _check(m, s)
    P = m.P(s.y)
    vt = (m.C2 / m.C1 + P) * s.p2
    W = vt ** 2 + P * s.p1 ** 2
    yq = P / (2 * m.delta)
    total = 0.0
    for j, c in enumerate(poly_coefficients(k, m.delta)):
        total += float(c) * yq ** j * W ** (k - j) * s.p1 ** (2 * j + 1)
    return W ** (k + 1) * s.x - s.y * vt * total


# -- symbolic forms (exact gradients for bracket checks) ------------------------

_X, _Y, _P1, _P2 = (sym(v) for v in PHASE_SYMBOLS)


def _num(v):
    return as_fraction(v) if isinstance(v, (int, Fraction, str)) else v


def hamiltonian_expr(C1, C2, n, delta) -> Expr:
    """Power-branch Hamiltonian as an expression in ``x, y, p1, p2``."""
    C1, C2, delta = _num(C1), _num(C2), _num(delta)
    A = 2 * C1 * delta * _Y ** (as_fraction(n) + 1) + C2
    return A * (C1 * _P1 ** 2 / 2 + A * _P2 ** 2 / 2)


def Tk_expr(C1, C2, delta, k: int) -> Expr:
    """``T_k`` as an expression (exact rational coefficients for rational inputs)."""
    C1, C2, delta = _num(C1), _num(C2), _num(delta)
    q = Fraction(-2, 2 * k + 1)
    P = 2 * delta * _Y ** q
    vt = (const(C2) / C1 + P) * _P2
    W = vt ** 2 + P * _P1 ** 2
    total = const(0)
    for j, c in enumerate(poly_coefficients(k, delta)):
        total = total + c * _Y ** (q * j) * W ** (k - j) * _P1 ** (2 * j + 1)
    return W ** (k + 1) * _X - _Y * vt * total


def H_quartic_expr() -> Expr:
    """``p1^2 / y^(2/3) + 2 p2^2 / y^(4/3)`` (n = -5/3, delta = C1 = 1, C2 = 0)."""
    return _P1 ** 2 * _Y ** Fraction(-2, 3) + 2 * _P2 ** 2 * _Y ** Fraction(-4, 3)


def T1_expr() -> Expr:
    """Quartic integral ``T_1 / 4`` with the ``x p1^4`` term carrying ``y^(-4/3)``."""
    y = _Y
    return (_X * y ** Fraction(-4, 3) * _P1 ** 4 - 3 * y ** Fraction(-1, 3) * _P2 * _P1 ** 3
            + 4 * _X * y ** -2 * _P2 ** 2 * _P1 ** 2 - 2 * y ** -1 * _P1 * _P2 ** 3
            + 4 * _X * y ** Fraction(-8, 3) * _P2 ** 4)


def T1_y23_expr() -> Expr:
    """Quartic integral with ``x p1^4 / y^(2/3)``; its bracket with H does not vanish."""
    return T1_expr() + _X * _P1 ** 4 * (_Y ** Fraction(-2, 3) - _Y ** Fraction(-4, 3))


def H_sextic_expr() -> Expr:
    """``p1^2 / y^(2/5) + 2 p2^2 / y^(4/5)`` (n = -7/5, delta = C1 = 1, C2 = 0)."""
    return _P1 ** 2 * _Y ** Fraction(-2, 5) + 2 * _P2 ** 2 * _Y ** Fraction(-4, 5)


def H_sextic_y43_expr() -> Expr:
    """Sextic-example Hamiltonian with the ``y^(4/3)`` denominator on ``p2^2``."""
    return _P1 ** 2 * _Y ** Fraction(-2, 5) + 2 * _P2 ** 2 * _Y ** Fraction(-4, 3)


def T2_expr(c_p2p5=Fraction(-4)) -> Expr:
    """Sextic integral ``T_2 / 8``; ``c_p2p5`` is the coefficient of ``p2^5 p1 / y``."""
    y = _Y
    return (_X * y ** Fraction(-6, 5) * _P1 ** 6 - 5 * y ** Fraction(-1, 5) * _P2 * _P1 ** 5
            + 6 * _X * y ** Fraction(-8, 5) * _P2 ** 2 * _P1 ** 4
            - Fraction(20, 3) * y ** Fraction(-3, 5) * _P2 ** 3 * _P1 ** 3
            + 12 * _X * y ** -2 * _P2 ** 4 * _P1 ** 2
            + const(c_p2p5) * y ** -1 * _P2 ** 5 * _P1
            + 8 * _X * y ** Fraction(-12, 5) * _P2 ** 6)


def _expr_grad(e: Expr):
    parts = [e.diff(v) for v in PHASE_SYMBOLS]

    def grad(s):
        env = dict(zip(PHASE_SYMBOLS, (float(v) for v in s)))
        return np.array([float(p.evaluate(env)) for p in parts])

    return grad


def solve_sextic_coefficient(states: Sequence[Sequence[float]], H: Optional[Expr] = None) -> tuple[float, float]:
    """Least-squares value of the ``p2^5 p1 / y`` coefficient making ``{T2, H}`` vanish.

    The bracket is affine in the unknown: ``{T2, H} = B0 + c B1``.  Returns
    ``(c, max normalized residual)`` over ``states``.
    """
    H = H if H is not None else H_sextic_expr()
    base = T2_expr(0)
    unit = _Y ** -1 * _P2 ** 5 * _P1
    gH, g0, g1 = _expr_grad(H), _expr_grad(base), _expr_grad(unit)
    B0, B1 = [], []
    for s in states:
        h = gH(s)
        B0.append(_bracket_from_grads(g0(s), h))
        B1.append(_bracket_from_grads(g1(s), h))
    B0, B1 = np.array(B0), np.array(B1)
    c = -float(B0 @ B1 / (B1 @ B1))
    full = _expr_grad(T2_expr(c))
    res = 0.0
    for s in states:
        gt, h = full(s), gH(s)
        res = max(res, abs(_bracket_from_grads(gt, h)) / (np.linalg.norm(gt) * np.linalg.norm(h)))
    return c, res


# -- curvature --------------------------------------------------------------------


def curvature(m: MetricSpec, y: float) -> float:
    """Gaussian curvature ``(n+1) C1^2 delta (C2 n y^(n-1) + delta C1 (n-1) y^(2n))``."""
    if m.kind == "log":
        raise ValueError("closed form available on the power branch; use brioschi_curvature")
    if not m.in_domain(y):
        raise ValueError(f"y={y} outside the metric domain")
    n, d, pw = m.n, m.delta, m.osc.pw
    return float(n + 1) * m.C1 ** 2 * d * (m.C2 * float(n) * pw(y, n - 1)
                                           + d * m.C1 * float(n - 1) * pw(y, 2 * n))


def _d1(f, x, y, h, axis):
    if axis == 0:
        return (-f(x + 2 * h, y) + 8 * f(x + h, y) - 8 * f(x - h, y) + f(x - 2 * h, y)) / (12 * h)
    return (-f(x, y + 2 * h) + 8 * f(x, y + h) - 8 * f(x, y - h) + f(x, y - 2 * h)) / (12 * h)


def _d2(f, x, y, h, axis):
    if axis == 0:
        s = lambda k: f(x + k * h, y)
    else:
        s = lambda k: f(x, y + k * h)
    return (-s(2) + 16 * s(1) - 30 * s(0) + 16 * s(-1) - s(-2)) / (12 * h * h)


def _dxy(f, x, y, h):
    return _d1(lambda a, b: _d1(f, a, b, h, 1), x, y, h, 0)


def brioschi_curvature(E: Callable, F: Callable, G: Callable, x: float, y: float,
                       h: float = 1e-3) -> float:
    """Gaussian curvature of ``E dx^2 + 2F dx dy + G dy^2`` by the Brioschi formula.

    All first and second partials come from fourth-order central differences,
    so the result is independent of any closed form.
    """
    hx = h * max(1.0, abs(x))
    hy = h * max(1.0, abs(y))
    e, f, g = E(x, y), F(x, y), G(x, y)
    Eu, Ev = _d1(E, x, y, hx, 0), _d1(E, x, y, hy, 1)
    Fu, Fv = _d1(F, x, y, hx, 0), _d1(F, x, y, hy, 1)
    Gu, Gv = _d1(G, x, y, hx, 0), _d1(G, x, y, hy, 1)
    Evv = _d2(E, x, y, hy, 1)
    Guu = _d2(G, x, y, hx, 0)
    Fuv = _dxy(F, x, y, max(hx, hy))
    M1 = np.array([
        [-Evv / 2 + Fuv - Guu / 2, Eu / 2, Fu - Ev / 2],
        [Fv - Gu / 2, e, f],
        [Gv / 2, f, g],
    ])
    M2 = np.array([
        [0.0, Ev / 2, Gu / 2],
        [Ev / 2, e, f],
        [Gu / 2, f, g],
    ])
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / (e * g - f * f) ** 2)


# -- brackets and independence -----------------------------------------------------


def _bracket_from_grads(gF, gG) -> float:
    return float(gF[0] * gG[2] - gF[2] * gG[0] + gF[1] * gG[3] - gF[3] * gG[1])


def _gradient(fn, s, grad, h):
    if grad is not None:
        return np.asarray(grad(s), dtype=float)
    if isinstance(fn, Expr):
        return _expr_grad(fn)(s)
    g = fd_gradient(lambda *z: fn(CoState(*z)), s, h)
    if not np.all(np.isfinite(g)):
        raise ValueError("non-finite gradient")
    return g


def poisson_bracket(F, G, s: CoState, grad_F=None, grad_G=None, h: float = 1e-5) -> float:
    """``sum_i F_qi G_pi - F_pi G_qi`` at ``s``.

    ``F`` and ``G`` are callables of a :class:`CoState` or expressions in
    ``x, y, p1, p2``; gradients come from ``grad_F``/``grad_G`` when given,
    symbolic differentiation for expressions, and central differences
    otherwise.
    """
    s = CoState(*s)
    return _bracket_from_grads(_gradient(F, s, grad_F, h), _gradient(G, s, grad_G, h))


def normalized_bracket(F, G, s: CoState, grad_F=None, grad_G=None, h: float = 1e-5) -> float:
    """``|{F, G}| / (|grad F| |grad G|)``."""
    s = CoState(*s)
    gF, gG = _gradient(F, s, grad_F, h), _gradient(G, s, grad_G, h)
    return abs(_bracket_from_grads(gF, gG)) / (np.linalg.norm(gF) * np.linalg.norm(gG))


def jacobi_singular_values(rows: Sequence[np.ndarray]) -> np.ndarray:
    """Singular values (descending) of the matrix whose rows are gradients."""
    return np.linalg.svd(np.vstack(rows), compute_uv=False)


def momentum_degree(fn: Callable[[float, float], float], max_degree: int = 8, radius: float = 1.0,
                    tol: float = 1e-9) -> Optional[int]:
    """Total degree of ``fn(p1, p2)`` as a polynomial, or None if it is not one.

    Restricted to lines ``t -> fn(c1 + t a, c2 + t b)`` in several
    directions, a polynomial of total degree ``d`` is a polynomial of degree
    ``<= d`` in ``t``, exactly ``d`` for generic directions.  Each restriction
    is interpolated at ``max_degree + 3`` Chebyshev nodes; the reported degree
    is the largest one whose coefficient is significant, provided the two
    extra coefficients vanish in every direction.
    """
    nodes = radius * np.cos(np.pi * (np.arange(max_degree + 3) + 0.5) / (max_degree + 3))
    V = np.vander(nodes, max_degree + 3, increasing=True)
    best = -1
    for ang in (0.3, 1.1, 1.9, 2.6):
        a, b = math.cos(ang), math.sin(ang)
        vals = np.array([fn(0.37 * radius + t * a, 0.61 * radius + t * b) for t in nodes])
        coef = np.linalg.solve(V, vals)
        scale = max(np.max(np.abs(coef)), 1e-300)
        if np.max(np.abs(coef[max_degree + 1:])) > tol * scale:
            return None
        sig = np.nonzero(np.abs(coef) > tol * scale)[0]
        best = max(best, int(sig[-1]) if sig.size else 0)
    return best
