import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sps

from superosc.numkit import (
    HypergeometricDomainError,
    PowerDomainError,
    binom,
    erf_fn,
    hyp2f1,
    hyp2f1_complement,
    poch,
    real_power,
)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(-4, 4), b=st.floats(-4, 4), dc=st.floats(0.1, 4), z=st.floats(-8, 0.98))
def test_hyp2f1_against_mpmath(a, b, dc, z):
    c = max(a, b, 0.0) + dc
    ref = float(mpmath.hyp2f1(a, b, c, z))
    assert abs(hyp2f1(a, b, c, z) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_hyp2f1_against_scipy_grid():
    for a in (-2.5, -0.5, 0.25, 1.0, 3.0):
        for c in (1.5, 2.25, 4.0):
            for z in np.linspace(-3, 0.97, 13):
                ref = sps.hyp2f1(a, 1.0, c, z)
                assert abs(hyp2f1(a, 1.0, c, z) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_elementary_identities():
    for a in (-1.3, 0.4, 2.0):
        for z in (-4.0, -0.3, 0.2, 0.9):
            assert math.isclose(hyp2f1(a, 1.7, 1.7, z), (1 - z) ** (-a), rel_tol=1e-12)
    assert hyp2f1(1.5, 2.0, 3.0, 0.0) == 1.0
    assert hyp2f1(0.0, 2.0, 3.0, 0.7) == 1.0
    assert math.isclose(hyp2f1(1, 1, 2, 0.5), -math.log(0.5) / 0.5, rel_tol=1e-13)


def test_terminating_series_beyond_unit_disk():
    # 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
    b, c, z = 1.0, 0.5, 7.0
    want = 1 - 2 * b * z / c + b * (b + 1) * z * z / (c * (c + 1))
    assert math.isclose(hyp2f1(-2.0, b, c, z), want, rel_tol=1e-13)


def test_complement_avoids_cancellation():
    z1 = 1e-13
    a, b, c = 0.3, 1.0, 2.1
    ref = float(mpmath.hyp2f1(a, b, c, mpmath.mpf(1) - mpmath.mpf(z1)))
    assert abs(hyp2f1_complement(a, b, c, 1 - z1, z1) - ref) < 1e-10 * abs(ref)


def test_domain_errors():
    with pytest.raises(HypergeometricDomainError):
        hyp2f1(0.5, 1.0, 1.5, 1.2)
    with pytest.raises(HypergeometricDomainError):
        hyp2f1(0.5, 1.0, -2.0, 0.3)


def test_erf_poch_binom():
    assert erf_fn(0.0) == 0.0
    xs = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(erf_fn(xs), sps.erf(xs), rtol=1e-15, atol=1e-16)
    assert erf_fn(-0.7) == -erf_fn(0.7)
    assert poch(Fraction(1, 2), 3) == Fraction(15, 8)
    assert poch(2.0, 0) == 1.0
    assert binom(5, 2) == 10
    with pytest.raises(ValueError):
        poch(1, -1)


def test_real_power():
    assert real_power(-2.0, 3) == -8.0
    assert real_power(4.0, Fraction(1, 2)) == 2.0
    assert math.isclose(real_power(-8.0, Fraction(1, 3), odd_roots=True), -2.0)
    assert math.isclose(real_power(-8.0, Fraction(2, 3), odd_roots=True), 4.0)
    with pytest.raises(PowerDomainError):
        real_power(-8.0, Fraction(1, 3))
    with pytest.raises(PowerDomainError):
        real_power(-4.0, Fraction(1, 2), odd_roots=True)
    with pytest.raises(PowerDomainError):
        real_power(0.0, -1)
