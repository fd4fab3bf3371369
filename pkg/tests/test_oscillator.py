import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superosc.numkit import HypergeometricDomainError
from superosc.oscillator import (
    BranchError,
    DegenerateBranch,
    I1,
    I2,
    I2_alt,
    I2_poly,
    N1,
    N2,
    OscParams,
    PhaseState,
    arc_drift,
    degenerate_geodesic,
    drift,
    explicit_geodesic,
    explicit_geodesic_pair,
    hyp_parameters,
    integrate_oscillator,
    osc_rhs,
    poly_coefficients,
    poly_exponent,
)

TOL = dict(rtol=1e-12, atol=1e-14)


def test_params_validation():
    assert OscParams("-5/3", 1).n == Fraction(-5, 3)
    assert OscParams(-1.4, 1).n == Fraction(-7, 5)
    for n in (0, 1):
        with pytest.raises(ValueError):
            OscParams(n, 1)
    with pytest.raises(ValueError):
        OscParams(2, 0)


def test_domain_rules():
    assert not OscParams(Fraction(1, 2), 1).in_domain(-1.0)
    assert OscParams(Fraction(1, 3), 1, odd_roots=True).in_domain(-1.0)
    assert not OscParams(Fraction(1, 2), 1, odd_roots=True).in_domain(-1.0)
    assert not OscParams(-2, 1).in_domain(0.0)
    assert OscParams(3, 1).in_domain(-2.0)
    assert not OscParams(-1, 1).in_domain(0.0)


def test_rhs():
    assert osc_rhs(OscParams(3, 2.0), PhaseState(0, 2.0, 0)) == -2.0 * 4 * 8
    assert osc_rhs(OscParams(-1, 1.5), PhaseState(0, 3.0, 0)) == -0.5


def test_hyp_parameters():
    assert hyp_parameters(3) == (0.75, 1.0, 1.25)
    assert hyp_parameters(-3)[0] == 0.0


@pytest.mark.parametrize("n, delta, y0, u0", [
    (3, 1, 1.0, 0.3), (Fraction(-5, 3), 1, 0.8, -0.4), (Fraction(-1, 2), -1, 1.0, 2.5), (2, 1, 0.02, 0.0),
])
def test_conservation(n, delta, y0, u0):
    p = OscParams(n, delta)
    traj = integrate_oscillator(p, PhaseState(0.0, y0, u0), 5.0, **TOL)
    assert traj.success
    S = [PhaseState(x, y, u) for x, (y, u) in zip(traj.t, traj.y)]
    assert drift([I1(p, s) for s in S]) < 1e-9
    assert arc_drift([I2(p, s) for s in S], [s.u for s in S]) < 1e-6


def test_I2_jumps_at_turning_points_but_is_constant_per_arc():
    p = OscParams(3, 1)
    traj = integrate_oscillator(p, PhaseState(0.0, 1.0, 0.0), 5.0, **TOL)
    S = [PhaseState(x, y, u) for x, (y, u) in zip(traj.t, traj.y)]
    vals = [I2(p, s) for s in S]
    assert drift(vals) > 1e-2
    assert arc_drift(vals, [s.u for s in S]) < 1e-9


def test_I2_alt_agrees_only_with_sign():
    rng = np.random.default_rng(0)
    p = OscParams(3, 1)
    for _ in range(50):
        s = PhaseState(rng.uniform(-1, 1), rng.uniform(0.2, 1.5), rng.uniform(-2, 2))
        assert abs(I2(p, s) - I2_alt(p, s)) < 1e-12 * max(1.0, abs(I2(p, s)))
        if s.u < 0:
            assert abs(I2(p, s) - I2_alt(p, s, signed=False)) > 1e-6


def test_I2_errors():
    p = OscParams(Fraction(-1, 2), -1)
    y = 4.0
    with pytest.raises(DegenerateBranch):
        I2(p, PhaseState(0, y, 2.0))
    with pytest.raises(HypergeometricDomainError):
        I2(p, PhaseState(0, y, 1.0))
    with pytest.raises(ValueError):
        I2(OscParams(-1, 1), PhaseState(0, 1, 1))


def test_terminating_case_allows_negative_I1():
    p = OscParams(-3, -1)
    s = PhaseState(0.2, 1.0, 0.5)
    assert I1(p, s) < 0
    assert math.isfinite(I2(p, s))


def test_poly_coefficients_exact():
    assert poly_coefficients(0, 1) == [1]
    assert poly_coefficients(2, 1) == [1, Fraction(8, 3), Fraction(32, 3)]
    assert poly_exponent(1) == Fraction(-5, 3)
    with pytest.raises(ValueError):
        poly_exponent(-1)
    with pytest.raises(ValueError):
        I2_poly(OscParams(3, 1), 1, PhaseState(0, 1, 1))


@settings(max_examples=50, deadline=None)
@given(k=st.integers(0, 2), x=st.floats(-2, 2), y=st.floats(0.3, 2), u=st.floats(-2, 2),
       delta=st.sampled_from([1.0, 0.5, 2.0]))
def test_polynomial_integral_is_power_of_I1_times_I2(k, x, y, u, delta):
    p = OscParams(poly_exponent(k), delta)
    s = PhaseState(x, y, u)
    lhs = I1(p, s) ** (k + 1) * I2(p, s)
    rhs = I2_poly(p, k, s)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs), abs(I1(p, s)) ** (k + 1) * abs(x))


def test_logarithmic_integrals():
    p = OscParams(-1, 2.0)
    traj = integrate_oscillator(p, PhaseState(0.0, 1.5, 0.8), 1.0, **TOL)
    S = [PhaseState(x, y, u) for x, (y, u) in zip(traj.t, traj.y)]
    assert drift([N1(s, 2.0) for s in S]) < 1e-10
    assert drift([N2(s, 2.0) for s in S]) < 1e-9
    with pytest.raises(ValueError):
        N2(S[0], -1.0)


def test_explicit_geodesic_lies_on_level_sets():
    p = OscParams(3, 1)
    C3, C4 = 2.0, 0.5
    for y in np.linspace(0.1, 0.9, 9):
        xp, xm = explicit_geodesic_pair(p, C3, C4, y)
        up = math.sqrt(C3 - 2 * y ** 4)
        assert abs(I2(p, PhaseState(xp, y, up)) - C4) < 1e-12
        assert abs(I2(p, PhaseState(xm, y, -up)) - C4) < 1e-12
    with pytest.raises(BranchError):
        explicit_geodesic(p, C3, C4, 1.1)
    with pytest.raises(ValueError):
        explicit_geodesic(p, 0.0, C4, 0.5)


def test_degenerate_geodesic_solves_equation():
    p = OscParams(3, -1)
    x = lambda y: degenerate_geodesic(p, 0.0, y)
    y = 0.7
    h = 1e-4
    dx = (x(y + h) - x(y - h)) / (2 * h)
    assert abs(dx * math.sqrt(2 * y ** 4) - 1) < 1e-7
    with pytest.raises(ValueError):
        degenerate_geodesic(OscParams(3, 1), 0.0, y)


def test_arc_drift_splits_on_sign_changes():
    assert arc_drift([1, 1, 5, 5], [1, 1, -1, -1]) == 0.0
    assert arc_drift([1, 2, 5, 5], [1, 1, -1, -1]) == 1.0
    assert drift([]) == 0.0
