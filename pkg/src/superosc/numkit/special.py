"""Real Gauss hypergeometric function, erf and small combinatorial helpers."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Real

import numpy as np

__all__ = [
    "hyp2f1",
    "hyp2f1_complement",
    "erf_fn",
    "poch",
    "binom",
    "real_power",
    "HypergeometricDomainError",
    "PowerDomainError",
]

_EPS = np.finfo(float).eps
_SERIES_MAX_TERMS = 1_000_000
_INT_TOL = 1e-12


class HypergeometricDomainError(ValueError):
    """Parameters or argument outside the real principal branch."""


class PowerDomainError(ValueError):
    """Real power requested for a base outside its real domain."""


def _near_int(v: float, tol: float = _INT_TOL) -> bool:
    return abs(v - round(v)) <= tol * max(1.0, abs(v))


def _nonpos_int(v: float) -> bool:
    return v <= 0.5 and _near_int(v)


def _rgamma(v: float) -> float:
    """1/Gamma(v), zero at the poles."""
    if _nonpos_int(v):
        return 0.0
    return 1.0 / math.gamma(v)


def _series(a: float, b: float, c: float, z: float) -> float:
    term = 1.0
    total = 1.0
    for k in range(_SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= _EPS * abs(total) * 0.25 and k > 2:
            return total
    raise HypergeometricDomainError(
        f"2F1 series did not converge for a={a}, b={b}, c={c}, z={z}")


def _terminating(a: float, b: float, c: float, z: float) -> float | None:
    for p in (a, b):
        if _nonpos_int(p):
            m = int(round(-p))
            if _nonpos_int(c) and -c < m:
                return None
            term = 1.0
            total = 1.0
            for k in range(m):
                term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
                total += term
            return total
    return None


def hyp2f1_complement(a: float, b: float, c: float, z: float, one_minus_z: float) -> float:
    """2F1(a, b; c; z) for ``z < 1`` given an accurate value of ``1 - z``.

    Callers that know ``1 - z`` analytically (e.g. ``u**2 / I1`` near a
    turning point) pass it here to avoid the cancellation in ``1 - z``.
    """
    a, b, c, z, zc = float(a), float(b), float(c), float(z), float(one_minus_z)
    if _nonpos_int(c):
        raise HypergeometricDomainError(f"c={c} is a non-positive integer (pole)")
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    poly = _terminating(a, b, c, z)
    if poly is not None:
        return poly
    if not (zc > 0.0) or not math.isfinite(z):
        raise HypergeometricDomainError(f"z={z} outside the real branch z < 1")
    if z < 0.0:
        # Pfaff: z -> z/(z-1); keep whichever form terminates if any does
        w = z / (z - 1.0)
        wc = 1.0 / zc
        if _nonpos_int(c - b):
            return zc ** (-a) * hyp2f1_complement(a, c - b, c, w, wc)
        return zc ** (-b) * hyp2f1_complement(c - a, b, c, w, wc)
    if z <= 0.5:
        return _series(a, b, c, z)
    s = c - a - b
    if _near_int(s, 1e-9):
        # logarithmic case of the 1 - z connection formula
        return _series(a, b, c, z)
    gc = math.gamma(c)
    t1 = gc * math.gamma(s) * _rgamma(c - a) * _rgamma(c - b)
    t2 = gc * math.gamma(-s) * _rgamma(a) * _rgamma(b)
    out = 0.0
    if t1 != 0.0:
        out += t1 * _series(a, b, 1.0 - s, zc)
    if t2 != 0.0:
        out += t2 * zc ** s * _series(c - a, c - b, 1.0 + s, zc)
    return out


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function on the real principal branch.

    Power series for ``|z| <= 1/2``, the ``z -> 1 - z`` connection formula on
    ``(1/2, 1)`` and the Pfaff transformation ``z -> z/(z - 1)`` for negative
    arguments.  Terminating series are summed directly for any real ``z``.
    """
    return hyp2f1_complement(a, b, c, z, 1.0 - float(z))


def erf_fn(x):
    """Error function (odd, ``|erf| < 1``); accepts scalars or arrays."""
    if np.ndim(x) == 0:
        return math.erf(float(x))
    return np.vectorize(math.erf, otypes=[float])(x)


def poch(a, s: int):
    """Rising factorial ``(a)_s = a (a+1) ... (a+s-1)``; exact for Fractions."""
    if s < 0:
        raise ValueError("Pochhammer index must be non-negative")
    out = Fraction(1) if isinstance(a, (int, Fraction)) else 1.0
    for j in range(s):
        out *= a + j
    return out


def binom(k: int, s: int) -> int:
    return math.comb(k, s)


def real_power(base, exponent, *, odd_roots: bool = False):
    """``base ** exponent`` restricted to real values.

    Integer exponents accept any base (non-zero when negative).  Non-integer
    exponents need ``base > 0`` (``base == 0`` for positive exponents).  With
    ``odd_roots`` a rational exponent ``p/q`` with odd ``q`` is extended to
    negative bases as ``(-1)**p * |base|**(p/q)``.
    """
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exponent = int(exponent)
    if isinstance(exponent, int) or (isinstance(exponent, Real) and float(exponent).is_integer()
                                     and not isinstance(exponent, Fraction)):
        e = int(exponent)
        if e < 0 and np.any(np.asarray(base) == 0):
            raise PowerDomainError(f"0 ** {e}")
        if isinstance(base, np.ndarray):
            return np.power(base.astype(float), e)
        return base ** e
    frac = exponent if isinstance(exponent, Fraction) else None
    ef = float(exponent)
    arr = np.asarray(base, dtype=float)
    neg = arr < 0
    zero = arr == 0
    if np.any(zero) and ef < 0:
        raise PowerDomainError(f"0 ** {exponent}")
    if np.any(neg):
        if not odd_roots:
            raise PowerDomainError(f"negative base with non-integer exponent {exponent}")
        if frac is None:
            frac = Fraction(ef).limit_denominator(10**6)
            if abs(float(frac) - ef) > 1e-14 * max(1.0, abs(ef)):
                raise PowerDomainError(f"exponent {exponent} is not rational")
        if frac.denominator % 2 == 0:
            raise PowerDomainError(f"even root ({frac}) of a negative base")
        sign = np.where(neg, -1.0 if frac.numerator % 2 else 1.0, 1.0)
        out = sign * np.abs(arr) ** ef
    else:
        out = arr ** ef
    if np.ndim(base) == 0:
        return float(out)
    return out
