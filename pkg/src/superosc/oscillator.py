"""The anharmonic oscillator y'' + delta (n+1) y^n = 0 and its first integrals.

For ``n = -1`` the equation is read as ``y'' + delta / y = 0`` and the
logarithmic integrals :func:`N1`, :func:`N2` replace :func:`I1`, :func:`I2`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .numkit import OdeProblem, Trajectory, integrate_ode
from .numkit.special import (
    HypergeometricDomainError,
    binom,
    erf_fn,
    hyp2f1_complement,
    poch,
    real_power,
)

__all__ = [
    "OscParams",
    "PhaseState",
    "DegenerateBranch",
    "BranchError",
    "as_fraction",
    "osc_rhs",
    "osc_field",
    "integrate_oscillator",
    "I1",
    "I2",
    "I2_alt",
    "I2_poly",
    "poly_exponent",
    "poly_coefficients",
    "N1",
    "N2",
    "explicit_geodesic",
    "explicit_geodesic_pair",
    "degenerate_geodesic",
    "hyp_parameters",
    "arc_drift",
    "drift",
]


class DegenerateBranch(ValueError):
    """``I1 = 0``: the transcendental integral is undefined; use :func:`degenerate_geodesic`."""

    tag = "degenerate"


class BranchError(ValueError):
    """A square root or hypergeometric argument left its real branch."""


def as_fraction(v) -> Fraction:
    """Exact rational for ints, Fractions, ``"p/q"`` strings and floats that are short rationals."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    f = Fraction(float(v)).limit_denominator(10_000)
    if abs(float(f) - float(v)) > 1e-12 * max(1.0, abs(float(v))):
        return Fraction(float(v))
    return f


@dataclass(frozen=True)
class OscParams:
    """Exponent ``n`` (stored exactly) and coefficient ``delta``.

    ``odd_roots`` opts into negative ``y`` for rational powers with odd
    denominators (``y^(p/q) = (-1)^p |y|^(p/q)``).
    """

    n: Fraction
    delta: float
    odd_roots: bool = False

    def __post_init__(self):
        n = as_fraction(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "delta", float(self.delta))
        if n in (0, 1):
            raise ValueError(f"n={n} makes the equation linear (n must not be 0 or 1)")
        if self.delta == 0 or not math.isfinite(self.delta):
            raise ValueError("delta must be a non-zero finite number")

    @property
    def is_log(self) -> bool:
        """True for ``n = -1`` (logarithmic integrals)."""
        return self.n == -1

    @property
    def nf(self) -> float:
        return float(self.n)

    def pw(self, y, e):
        return real_power(y, e, odd_roots=self.odd_roots)

    def in_domain(self, y) -> bool:
        y = float(y)
        if not math.isfinite(y):
            return False
        if self.is_log:
            return y > 0
        if self.n.denominator == 1:
            return y != 0 or self.n > 0
        if y > 0:
            return True
        if y == 0:
            return self.n > 0
        return self.odd_roots and self.n.denominator % 2 == 1


class PhaseState(NamedTuple):
    x: float
    y: float
    u: float  # y_x


def hyp_parameters(n) -> tuple[float, float, float]:
    """``(a, b, c) = ((n+3)/(2n+2), 1, (n+2)/(n+1))``."""
    n = as_fraction(n)
    return float((n + 3) / (2 * n + 2)), 1.0, float((n + 2) / (n + 1))


def _check_domain(p: OscParams, y):
    if not p.in_domain(y):
        raise ValueError(f"y={y} outside the domain of n={p.n}")


def osc_rhs(p: OscParams, s: PhaseState) -> float:
    """``y_xx`` from the equation: ``-delta (n+1) y^n`` (``-delta / y`` when n = -1)."""
    _check_domain(p, s.y)
    if p.is_log:
        return -p.delta / s.y
    return -p.delta * float(p.n + 1) * p.pw(s.y, p.n)


def osc_field(p: OscParams):
    """Right-hand side ``(y, u) -> (u, y_xx)`` for :func:`integrate_ode`."""
    coef = -p.delta * float(p.n + 1)
    n = p.n

    def rhs(x, z):
        y, u = z
        if p.is_log:
            return np.array([u, -p.delta / y])
        return np.array([u, coef * p.pw(y, n)])

    return rhs


def integrate_oscillator(p: OscParams, s0: PhaseState, span: float, **tol) -> Trajectory:
    """Integrate from ``s0`` over ``[x0, x0 + span]``; columns of ``y`` are ``(y, u)``."""
    _check_domain(p, s0.y)
    problem = OdeProblem(osc_field(p), np.array([s0.y, s0.u]), (s0.x, s0.x + span),
                         domain=lambda x, z: p.in_domain(z[0]), **tol)
    return integrate_ode(problem)


# -- integrals ---------------------------------------------------------------


def _potential(p: OscParams, y):
    return 2.0 * p.delta * p.pw(y, p.n + 1)


def I1(p: OscParams, s: PhaseState) -> float:
    """Autonomous integral ``u^2 + 2 delta y^(n+1)``."""
    if p.is_log:
        return N1(s, p.delta)
    _check_domain(p, s.y)
    return s.u ** 2 + _potential(p, s.y)


def _terminates(p: OscParams) -> bool:
    a = (p.n + 3) / (2 * p.n + 2)
    return a <= 0 and a.denominator == 1


def I2(p: OscParams, s: PhaseState) -> float:
    """Transcendental integral ``x - y u / I1 * 2F1(a, 1; c; 2 delta y^(n+1) / I1)``.

    Raises :class:`DegenerateBranch` when ``I1 = 0`` and
    :class:`HypergeometricDomainError` when the argument reaches ``z >= 1``
    in a non-terminating case (``I1 < 0``).  The value jumps at turning
    points ``u = 0`` unless the series terminates; on each arc of constant
    ``sign(u)`` it is constant.
    """
    if p.is_log:
        raise ValueError("n = -1: use N2")
    _check_domain(p, s.y)
    if s.u == 0 or s.y == 0:
        return float(s.x)
    pot = _potential(p, s.y)
    i1 = s.u ** 2 + pot
    if i1 == 0:
        raise DegenerateBranch("I1 = 0: use degenerate_geodesic")
    a, b, c = hyp_parameters(p.n)
    F = hyp2f1_complement(a, b, c, pot / i1, s.u ** 2 / i1)
    return s.x - s.y * s.u / i1 * F


def I2_alt(p: OscParams, s: PhaseState, *, signed: bool = True) -> float:
    """Quadrature form ``x - sgn(u) y / sqrt(I1) * 2F1(1/2, 1/(n+1); (n+2)/(n+1); z)``.

    The factor ``sgn(u)`` makes it coincide with :func:`I2` on every arc;
    ``signed=False`` drops it, which agrees with :func:`I2` only where
    ``u > 0``.
    """
    if p.is_log:
        raise ValueError("n = -1: use N2")
    _check_domain(p, s.y)
    if s.y == 0 or (signed and s.u == 0):
        return float(s.x)
    pot = _potential(p, s.y)
    i1 = s.u ** 2 + pot
    if i1 == 0:
        raise DegenerateBranch("I1 = 0: use degenerate_geodesic")
    if i1 < 0:
        raise HypergeometricDomainError("I1 < 0: no real square root")
    n = p.n
    F = hyp2f1_complement(0.5, float(1 / (n + 1)), float((n + 2) / (n + 1)), pot / i1,
                          s.u ** 2 / i1)
    sign = math.copysign(1.0, s.u) if signed else 1.0
    return s.x - sign * s.y / math.sqrt(i1) * F


def poly_exponent(k: int) -> Fraction:
    """``n = -(2k+3)/(2k+1)``, where the transcendental integral becomes polynomial."""
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"k={k!r} must be a non-negative integer")
    return Fraction(-(2 * k + 3), 2 * k + 1)


def poly_coefficients(k: int, delta) -> list:
    """``(-1)^s C(k,s) (2 delta)^s s! / (1/2 - k)_s`` for ``s = 0..k`` (exact for rational delta)."""
    poly_exponent(k)
    d = Fraction(delta) if isinstance(delta, (int, Fraction)) else float(delta)
    half = Fraction(1, 2) - k
    out = []
    for s in range(k + 1):
        c = Fraction((-1) ** s * binom(k, s) * math.factorial(s)) / poch(half, s)
        out.append(c * (2 * d) ** s)
    return out


def I2_poly(p: OscParams, k: int, s: PhaseState) -> float:
    """Polynomial integral of degree ``2k+2`` in ``u`` at ``n = -(2k+3)/(2k+1)``.

    ``x W^(k+1) - y u sum_s c_s y^(-2s/(2k+1)) W^(k-s)`` with
    ``W = u^2 + 2 delta y^(-2/(2k+1))``; equals ``I1^(k+1) * I2``.
    """
    if p.n != poly_exponent(k):
        raise ValueError(f"n={p.n} does not match k={k} (expected {poly_exponent(k)})")
    _check_domain(p, s.y)
    q = Fraction(-2, 2 * k + 1)
    yq = p.pw(s.y, q)
    W = s.u ** 2 + 2 * p.delta * yq
    coeffs = poly_coefficients(k, p.delta)
    total = 0.0
    for j, c in enumerate(coeffs):
        total += float(c) * yq ** j * W ** (k - j)
    return s.x * W ** (k + 1) - s.y * s.u * total


def N1(s: PhaseState, delta: float) -> float:
    """``u^2 + 2 delta ln y`` for ``y'' + delta / y = 0``."""
    if not s.y > 0:
        raise ValueError("N1 needs y > 0")
    return s.u ** 2 + 2 * delta * math.log(s.y)


def N2(s: PhaseState, delta: float) -> float:
    """``x + sqrt(pi / (2 delta)) y exp(u^2 / (2 delta)) erf(u / sqrt(2 delta))``, delta > 0."""
    if not s.y > 0:
        raise ValueError("N2 needs y > 0")
    if not delta > 0:
        raise ValueError("N2 is real only for delta > 0")
    r = math.sqrt(2 * delta)
    return s.x + math.sqrt(math.pi / (2 * delta)) * s.y * math.exp(s.u ** 2 / (2 * delta)) * erf_fn(s.u / r)


# -- explicit geodesics --------------------------------------------------------


def explicit_geodesic(p: OscParams, C3: float, C4: float, y: float, branch: int = 1) -> float:
    """``x(y)`` on the level set ``I1 = C3``, ``I2 = C4``.

    ``x = C4 + branch * y / C3 * sqrt(C3 - 2 delta y^(n+1)) * 2F1(a, 1; c; 2 delta y^(n+1) / C3)``;
    ``branch = +1`` is the arc with ``u > 0``.
    """
    if C3 == 0:
        raise ValueError("C3 = 0: use degenerate_geodesic")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    _check_domain(p, y)
    if y == 0:
        return float(C4)
    pot = _potential(p, y)
    rad = C3 - pot
    if not rad > 0:
        raise BranchError(f"C3 - 2 delta y^(n+1) = {rad} <= 0 at y={y}")
    a, b, c = hyp_parameters(p.n)
    try:
        F = hyp2f1_complement(a, b, c, pot / C3, rad / C3)
    except HypergeometricDomainError as exc:
        raise BranchError(str(exc)) from None
    return C4 + branch * y / C3 * math.sqrt(rad) * F


def explicit_geodesic_pair(p: OscParams, C3: float, C4: float, y: float) -> tuple[float, float]:
    return explicit_geodesic(p, C3, C4, y, 1), explicit_geodesic(p, C3, C4, y, -1)


def degenerate_geodesic(p: OscParams, C5: float, y: float, branch: int = 1) -> float:
    """``x(y)`` on ``I1 = 0`` (delta < 0): ``C5 + branch * 2 / ((1-n) sqrt(-2 delta)) * y^((1-n)/2)``."""
    if not p.delta < 0:
        raise ValueError("the I1 = 0 curves are real only for delta < 0")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    _check_domain(p, y)
    e = (1 - p.n) / 2
    coef = 2.0 / (float(1 - p.n) * math.sqrt(-2 * p.delta))
    return C5 + branch * coef * p.pw(y, e)


# -- drift measurement ---------------------------------------------------------


def drift(values: Sequence[float]) -> float:
    """``max - min`` of a sequence of integral values."""
    v = np.asarray(values, dtype=float)
    return float(v.max() - v.min()) if v.size else 0.0


def arc_drift(values: Sequence[float], u: Sequence[float]) -> float:
    """Largest drift over maximal runs where ``sign(u)`` is constant and non-zero."""
    v = np.asarray(values, dtype=float)
    sg = np.sign(np.asarray(u, dtype=float))
    worst = 0.0
    start = None
    for i in range(len(v) + 1):
        if i < len(v) and sg[i] != 0 and (start is None or sg[i] == sg[start]):
            if start is None:
                start = i
            continue
        if start is not None:
            worst = max(worst, drift(v[start:i]))
        start = i if i < len(v) and sg[i] != 0 else None
    return worst
