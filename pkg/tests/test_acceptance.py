"""Exit criteria, one test each; the terminal summary prints a pass/fail line per criterion."""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from _exprgen import random_expr
from superosc.geodesic import (
    CoState,
    H_quartic_expr,
    H_sextic_expr,
    MetricSpec,
    T1_expr,
    T2_expr,
    brioschi_curvature,
    curvature,
    geodesic_flow,
    hamiltonian,
    hamiltonian_gradient,
    integral_L,
    integral_R,
    integral_T,
    integral_Tk,
    jacobi_singular_values,
    lifted_N2,
    momentum_degree,
    n_minus1_metric,
    normalized_bracket,
    slope,
    solve_sextic_coefficient,
)
from superosc.lienard import (
    caseII_family,
    caseIII_family,
    duffing_shift,
    dvdp_example,
    verify_equivalence,
)
from superosc.metrisability import (
    CubicOscSpec,
    PsiTriple,
    classify,
    liouville_residual,
    reconstruct_metric,
    round_trip_error,
    solve_psi,
)
from superosc.numkit import fd_derivative, fd_gradient, hyp2f1, parse_expr
from superosc.oscillator import (
    I1,
    I2,
    I2_poly,
    N1,
    N2,
    OscParams,
    PhaseState,
    arc_drift,
    degenerate_geodesic,
    drift,
    explicit_geodesic,
    integrate_oscillator,
    poly_exponent,
)

pytestmark = pytest.mark.acceptance
TOL = dict(rtol=1e-12, atol=1e-14)


def _osc_states(p, y0, u0, span=5.0):
    traj = integrate_oscillator(p, PhaseState(0.0, y0, u0), span, **TOL)
    assert traj.success, traj.message
    return [PhaseState(x, y, u) for x, (y, u) in zip(traj.t, traj.y)]


@pytest.mark.criterion(1, "oscillator conservation of I1 and I2")
def test_oscillator_conservation(detail):
    rng = np.random.default_rng(1)
    cases = [
        (2, 1, (0.01, 0.03), (-0.01, 0.01)),
        (3, 1, (0.5, 1.5), (-1, 1)),
        (-3, 1, (0.5, 1.5), (-1, 1)),
        (Fraction(-5, 3), 1, (0.5, 1.5), (-1, 1)),
        (Fraction(-7, 5), 1, (0.5, 1.5), (-1, 1)),
        (Fraction(-1, 2), -1, (0.5, 1.5), (2, 3)),
    ]
    t0 = time.perf_counter()
    worst1 = worst2 = 0.0
    for n, delta, yr, ur in cases:
        p = OscParams(n, delta)
        for _ in range(5):
            states = _osc_states(p, rng.uniform(*yr), rng.uniform(*ur))
            d1 = drift([I1(p, s) for s in states])
            d2 = arc_drift([I2(p, s) for s in states], [s.u for s in states])
            assert d1 < 1e-9, (n, d1)
            assert d2 < 1e-6, (n, d2)
            worst1, worst2 = max(worst1, d1), max(worst2, d2)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    detail(f"max I1 drift {worst1:.1e}, max I2 drift {worst2:.1e}, {elapsed:.2f} s")


@pytest.mark.criterion(2, "polynomial integrals at n = -(2k+3)/(2k+1)")
def test_polynomial_degeneration(detail):
    rng = np.random.default_rng(2)
    worst = 0.0
    degrees = []
    for k in range(3):
        p = OscParams(poly_exponent(k), 1)
        for _ in range(3):
            states = _osc_states(p, rng.uniform(0.5, 1.5), rng.uniform(-1, 1))
            vals = np.array([I2_poly(p, k, s) for s in states])
            d = drift(vals) / max(1.0, np.max(np.abs(vals)))
            assert d < 1e-6
            worst = max(worst, d)
        m = MetricSpec.power(1, 1, poly_exponent(k), 1)
        deg = momentum_degree(lambda a, b: integral_Tk(m, k, CoState(0.3, 0.8, a, b)))
        assert deg == 2 * k + 2
        degrees.append(deg)
    p = OscParams(-3, 1)
    ident = 0.0
    for _ in range(100):
        s = PhaseState(rng.uniform(-2, 2), rng.uniform(0.3, 2), rng.uniform(-2, 2))
        lhs, rhs = I1(p, s) * I2(p, s), I2_poly(p, 0, s)
        ident = max(ident, abs(lhs - rhs) / max(1.0, abs(rhs)))
    assert ident < 1e-10
    detail(f"I2_poly drift {worst:.1e}, degrees {degrees}, I1*I2 identity {ident:.1e}")


@pytest.mark.criterion(3, "geodesic superintegrability")
def test_geodesic_superintegrability(detail):
    rng = np.random.default_rng(3)
    worst = {"L": 0.0, "H": 0.0, "T": 0.0, "R": 0.0}
    min_ratio = math.inf
    checked = 0
    for C2 in (0, 1):
        for n in (3, Fraction(-5, 3)):
            m = MetricSpec.power(1, C2, n, 1)
            for _ in range(3):
                s0 = CoState(0.0, rng.uniform(0.6, 1.2), rng.uniform(0.5, 1.5), rng.uniform(-1, 1))
                traj = geodesic_flow(m, s0, 5.0, **TOL)
                assert traj.success, traj.message
                S = [CoState(*z) for z in traj.y]
                worst["L"] = max(worst["L"], drift([integral_L(s) for s in S]))
                worst["H"] = max(worst["H"], drift([hamiltonian(m, s) for s in S]))
                worst["T"] = max(worst["T"], arc_drift([integral_T(m, s) for s in S],
                                                       [slope(m, s) for s in S]))
                for s in S[:: max(1, len(S) // 5)][:5]:
                    sv = jacobi_singular_values([
                        hamiltonian_gradient(m, s),
                        fd_gradient(lambda *z: integral_T(m, CoState(*z)), s),
                        np.array([0.0, 0.0, 1.0, 0.0]),
                    ])
                    min_ratio = min(min_ratio, sv[2] / sv[0])
                    checked += 1
                    R = integral_R(m, s)
                    worst["R"] = max(worst["R"], abs(R - (2 * hamiltonian(m, s) / s.p1 ** 2 - C2)))
    assert worst["L"] <= 1e-12
    assert worst["H"] < 1e-9
    assert worst["T"] < 1e-6
    assert worst["R"] < 1e-10
    assert checked >= 50 and min_ratio > 1e-6
    detail("drifts " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
           + f", min sigma3/sigma1 {min_ratio:.2e} over {checked} states")


@pytest.mark.criterion(4, "quartic and sextic integrals commute with H")
def test_quartic_sextic_brackets(detail):
    rng = np.random.default_rng(4)
    states = [CoState(rng.uniform(-2, 2), rng.uniform(0.3, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
              for _ in range(100)]
    b1 = max(normalized_bracket(T1_expr(), H_quartic_expr(), s) for s in states)
    b2 = max(normalized_bracket(T2_expr(), H_sextic_expr(), s) for s in states)
    c, res = solve_sextic_coefficient(states)
    assert b1 < 1e-8 and b2 < 1e-8
    assert abs(c + 4) < 1e-9 and res < 1e-8
    detail(f"|{{T1,H}}| {b1:.1e}, |{{T2,H}}| {b2:.1e}, recovered coefficient {c:.12f}")


@pytest.mark.criterion(5, "curvature against the Brioschi oracle")
def test_curvature(detail):
    settings = [(3, 1, 1, 1), (Fraction(-5, 3), 2, 1, 0.5), (2, 1, 0, 1)]
    worst = 0.0
    count = 0
    for n, C1, C2, delta in settings:
        m = MetricSpec.power(C1, C2, n, delta)
        E = lambda x, y, m=m: m.g11(y)
        G = lambda x, y, m=m: m.g22(y)
        ks = []
        for y in np.linspace(0.4, 1.5, 17):
            k = curvature(m, y)
            kb = brioschi_curvature(E, lambda x, y: 0.0, G, 0.2, y)
            worst = max(worst, abs(k - kb) / abs(k))
            ks.append(abs(k))
            count += 1
        assert max(ks) > 1e-3
    assert count >= 50 and worst < 1e-5
    detail(f"max relative error {worst:.1e} over {count} points")


@pytest.mark.criterion(6, "explicit geodesics")
def test_explicit_geodesics(detail):
    h = 1e-4
    slope_err = curve_err = 0.0
    for n, delta, C3, C4 in [(3, 1, 2.0, 0.5), (Fraction(-5, 3), 1, 6.0, -1.0), (2, -1, 1.0, 0.0)]:
        p = OscParams(n, delta)
        for y in np.linspace(0.3, 0.8, 11):
            for branch in (1, -1):
                x = lambda v: explicit_geodesic(p, C3, C4, v, branch)
                u = branch * math.sqrt(C3 - 2 * delta * y ** float(n + 1))
                dx = fd_derivative(x, y, 1, h)
                slope_err = max(slope_err, abs(dx * u - 1))
                d2x = fd_derivative(x, y, 2, h)
                yxx = -d2x / dx ** 3
                force = delta * float(n + 1) * y ** float(n)
                curve_err = max(curve_err, abs(yxx + force) / max(1.0, abs(force)))
                s = PhaseState(x(y), y, u)
                assert abs(I1(p, s) - C3) < 1e-12 and abs(I2(p, s) - C4) < 1e-10
    deg_err = 0.0
    for n in (3, Fraction(-1, 2)):
        p = OscParams(n, -1)
        for y in np.linspace(0.4, 1.2, 9):
            x = lambda v: degenerate_geodesic(p, 0.7, v, 1)
            dx = fd_derivative(x, y, 1, h)
            u = math.sqrt(2 * y ** float(n + 1))
            d2x = fd_derivative(x, y, 2, h)
            yxx = -d2x / dx ** 3
            force = -float(n + 1) * y ** float(n)
            deg_err = max(deg_err, abs(dx * u - 1), abs(yxx + force) / max(1.0, abs(force)))
    assert slope_err < 1e-6 and curve_err < 1e-5 and deg_err < 1e-6
    detail(f"slope {slope_err:.1e}, curve residual {curve_err:.1e}, C3=0 branch {deg_err:.1e}")


@pytest.mark.criterion(7, "metrisability round trip")
def test_metrisability_round_trip(detail):
    n, delta = 3, 1.0
    anh = CubicOscSpec.parse(g="4*y^3")
    rep = classify(anh)
    assert rep.case == "III"
    ys = np.linspace(0.6, 1.8, 20)
    errs = {}
    for name, spec, case in [("III", anh, "III"), ("IV", CubicOscSpec.parse(k="1"), "IV"),
                             ("V", CubicOscSpec.parse(h="1/y"), "V")]:
        assert classify(spec).case == case
        sol = solve_psi(spec, case, 0.6, 1.8)
        errs[name] = round_trip_error(spec, reconstruct_metric(sol.psi), ys)
        assert errs[name] < 1e-7
    C1, C2 = 1.3, 0.4
    psi = PsiTriple.from_functions(
        lambda x, y: 2 * C1 * delta * y ** (n + 1) + C2, lambda x, y: 0.0, lambda x, y: C1,
        partials=lambda x, y: [[0.0, 2 * C1 * delta * (n + 1) * y ** n], [0.0, 0.0], [0.0, 0.0]],
        x_independent=True)
    a = lambda x, y: (delta * (n + 1) * y ** n, 0.0, 0.0, 0.0)
    liou = max(float(np.max(np.abs(liouville_residual(a, psi, x, y))))
               for x in np.linspace(-1, 1, 20) for y in np.linspace(0.5, 1.5, 20))
    assert liou < 1e-8
    detail("round trips " + ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
           + f", closed-form psi Liouville residual {liou:.1e}")


@pytest.mark.criterion(8, "Lienard equivalence")
def test_lienard_equivalence(detail):
    out = {}
    for name, fam, ic in [("duffing", caseII_family(3, 1, 1), (0.0, 0.5, 0.0)),
                          ("caseIII", caseIII_family(1), (0.0, 0.8, 0.1))]:
        r = verify_equivalence(*fam, ic, 5.0)
        assert r["status"] == "success"
        assert r["max_equation_residual"] < 1e-6
        assert r["J1_drift"] < 1e-6 and r["J2_drift"] < 1e-5 and not r["excluded_xi"]
        out[name] = r
    r = verify_equivalence(*dvdp_example(2, 1), (0.0, 1.0, 0.0), 5.0)
    assert r["status"] == "success" and r["max_equation_residual"] < 1e-5
    shift = duffing_shift(Fraction(3, 2), Fraction(-2, 5))
    assert shift.exact
    detail(", ".join(f"{k} residual {v['max_equation_residual']:.1e} J1 {v['J1_drift']:.1e} "
                     f"J2 {v['J2_drift']:.1e}" for k, v in out.items())
           + f", dvdp residual {r['max_equation_residual']:.1e}, shift identity exact")


@pytest.mark.criterion(9, "logarithmic case n = -1")
def test_logarithmic_case(detail):
    rng = np.random.default_rng(9)
    p = OscParams(-1, 1)
    dn1 = dn2 = 0.0
    for _ in range(5):
        states = _osc_states(p, rng.uniform(1, 2), rng.uniform(0.5, 1.0), span=1.0)
        dn1 = max(dn1, drift([N1(s, 1.0) for s in states]))
        dn2 = max(dn2, drift([N2(s, 1.0) for s in states]))
    m = n_minus1_metric(1.0, 1.0, 1.0)
    dh = dl = 0.0
    # geodesics creep toward A = 0, where p2 ~ 1/A; span 2 keeps A well away from it
    for _ in range(5):
        s0 = CoState(0.0, rng.uniform(1, 2), rng.uniform(0.3, 1.0), rng.uniform(-0.3, 0.3))
        traj = geodesic_flow(m, s0, 2.0, **TOL)
        assert traj.success, traj.message
        S = [CoState(*z) for z in traj.y]
        dh = max(dh, drift([hamiltonian(m, s) for s in S]))
        dl = max(dl, drift([lifted_N2(m, s) for s in S]))
    assert dn1 < 1e-6 and dn2 < 1e-6 and dh < 1e-9 and dl < 1e-6
    detail(f"N1 {dn1:.1e}, N2 {dn2:.1e}, H {dh:.1e}, lifted N2 {dl:.1e}")


@pytest.mark.criterion(10, "numerical kit")
def test_numkit(detail):
    rng = np.random.default_rng(10)
    hyp = 0.0
    for _ in range(200):
        a, b, z = rng.uniform(-3, 3), rng.uniform(0.2, 3), rng.uniform(-5, 0.95)
        hyp = max(hyp, abs(hyp2f1(a, b, b, z) - (1 - z) ** (-a)) / (1 - z) ** (-a))
        hyp = max(hyp, abs(hyp2f1(a, b, b + 0.7, 0.0) - 1), abs(hyp2f1(0.0, b, b + 0.7, z) - 1))
        c = b + rng.uniform(0.3, 2)
        ref = float(mpmath.hyp2f1(a, b, c, z))
        hyp = max(hyp, abs(hyp2f1(a, b, c, z) - ref) / max(1.0, abs(ref)))
    assert hyp < 1e-10
    parse_err = diff_err = 0.0
    for _ in range(100):
        e = parse_expr(random_expr(rng, 3))
        again = parse_expr(str(e))
        dx = e.diff("x")
        for _ in range(3):
            x, y = rng.uniform(0.5, 1.5, 2)
            v = float(e.evaluate(x=x, y=y))
            parse_err = max(parse_err, abs(float(again.evaluate(x=x, y=y)) - v) / max(1.0, abs(v)))
            fd = fd_derivative(lambda t: float(e.evaluate(x=t, y=y)), x, 1, 1e-5)
            exact = float(dx.evaluate(x=x, y=y))
            diff_err = max(diff_err, abs(fd - exact) / max(1.0, abs(exact)))
    assert parse_err < 1e-6 and diff_err < 1e-6
    detail(f"2F1 {hyp:.1e}, parser round trip {parse_err:.1e}, derivative vs FD {diff_err:.1e}")
