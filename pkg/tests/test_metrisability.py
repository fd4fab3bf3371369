import math

import numpy as np
import pytest

from superosc.geodesic import MetricSpec
from superosc.metrisability import (
    CubicOscSpec,
    DegenerateSolution,
    LiouvilleGateError,
    MetricTensorField,
    PsiTriple,
    canonical_check,
    christoffel,
    classify,
    liouville_residual,
    metric_hamiltonian_flow,
    positive_definite,
    project,
    psi_from_metric,
    reconstruct_metric,
    round_trip_error,
    solve_psi,
)

YS = np.linspace(0.6, 1.8, 15)


def test_christoffel_symmetry_and_flat_polar():
    # polar coordinates: dr^2 + r^2 dth^2 with (x, y) = (th, r)
    g = MetricTensorField(lambda x, y: y * y, lambda x, y: 0.0, lambda x, y: 1.0)
    G = christoffel(g, 0.3, 2.0)
    assert np.array_equal(G[:, 0, 1], G[:, 1, 0])
    assert math.isclose(G[1, 0, 0], -2.0, rel_tol=1e-6)
    assert math.isclose(G[0, 0, 1], 0.5, rel_tol=1e-6)


def test_projection_of_anharmonic_metric():
    m = MetricSpec.power(2, 1 / 3, 3, 0.7)
    a = project(m.tensor_field(), 0.0, 1.3)
    assert np.allclose(a, (0.7 * 4 * 1.3 ** 3, 0, 0, 0), atol=1e-12)


def test_liouville_residual_of_metric_psi():
    m = MetricSpec.power(1, 0.5, 3, 1)
    g = m.tensor_field()
    psi = psi_from_metric(g)
    for x, y in [(0.0, 0.7), (1.0, 1.2)]:
        r = liouville_residual(lambda x, y: project(g, x, y), psi, x, y)
        assert np.max(np.abs(r)) < 1e-10


@pytest.mark.parametrize("coeffs, case", [
    (dict(g="4*y^3"), "III"),
    (dict(k="1"), "IV"),
    (dict(h="1/y"), "V"),
    (dict(h="1"), "V"),
    (dict(f="3", g="2*y + 1"), "II"),
    (dict(k="(16/27)*y^(-2)", h="y^(-1)", f="1", g="y"), "I"),
    (dict(k="y", h="1", f="y^2", g="3"), "none"),
])
def test_classify(coeffs, case):
    assert classify(CubicOscSpec.parse(**coeffs)).case == case


@pytest.mark.parametrize("coeffs, case, init", [
    (dict(g="4*y^3"), "III", None),
    (dict(k="1"), "IV", None),
    (dict(h="1"), "V", None),
    (dict(f="3", g="2*y + 1"), "II", None),
    (dict(k="(16/27)*y^(-2)", h="y^(-1)", f="1", g="y"), "I", None),
    (dict(k="1", f="-3", g="2^(1/2)"), "I", (1.0, 1.0)),
])
def test_round_trip(coeffs, case, init):
    spec = CubicOscSpec.parse(**coeffs)
    assert classify(spec).case == case
    sol = solve_psi(spec, case, 0.6, 1.8, init)
    assert sol.max_residual < 1e-7
    g = reconstruct_metric(sol.psi)
    assert round_trip_error(spec, g, YS) < 1e-7


def test_case_III_matches_closed_form():
    delta, n = 1.0, 3
    spec = CubicOscSpec.parse(g="4*y^3")
    psi1_0, psi3_0 = 1.0, 1.0
    sol = solve_psi(spec, "III", 0.6, 1.8, (psi1_0, psi3_0))
    c = psi3_0
    cprime = psi1_0 - 2 * c * delta * 0.6 ** (n + 1)
    for y in YS:
        p, _ = sol.psi(0.0, y)
        assert np.allclose(p, (2 * c * delta * y ** (n + 1) + cprime, 0.0, c), atol=1e-9)


def test_case_V_exponential_closed_form():
    spec = CubicOscSpec.parse(h="1")
    sol = solve_psi(spec, "V", 0.6, 1.8, (1.0, 0.0, 1.0))
    for y in YS:
        p, _ = sol.psi(0.0, y)
        assert math.isclose(p[0], math.exp(-4 * (y - 0.6) / 3), rel_tol=1e-9)
        assert math.isclose(p[2], math.exp(2 * (y - 0.6) / 3), rel_tol=1e-9)


def test_solve_psi_guards():
    spec = CubicOscSpec.parse(k="1", f="-3", g="2^(1/2)")
    with pytest.raises(DegenerateSolution):
        solve_psi(spec, "I", 0.6, 1.8)
    wrong = CubicOscSpec.parse(k="y", h="1", f="y^2", g="3")
    with pytest.raises((LiouvilleGateError, DegenerateSolution)):
        solve_psi(wrong, "III", 0.6, 1.8)


def test_reconstructed_metric_has_linear_integral():
    spec = CubicOscSpec.parse(g="4*y^3")
    g = reconstruct_metric(solve_psi(spec, "III", 0.5, 2.0).psi)
    assert all(positive_definite(g, [(0.0, y) for y in YS]))
    traj = metric_hamiltonian_flow(g, (0.0, 1.2, 0.4, 0.1), 0.3, rtol=1e-12, atol=1e-14)
    assert traj.success
    assert np.ptp(traj.y[:, 2]) < 1e-12


def test_canonical_form():
    rep = canonical_check("y^2")
    assert rep["projection_error"] < 1e-8
    assert rep["p1_drift"] < 1e-12 and rep["H_drift"] < 1e-9
    with pytest.raises(ValueError):
        canonical_check("y - 1", interval=(0.5, 2.0))


def test_constant_psi_and_spec_validation():
    psi = PsiTriple.constant(1.0, 0.0, 1.0)
    assert psi.delta(0, 0) == 1.0
    assert np.allclose(liouville_residual((0, 0, 0, 0), psi, 0.0, 0.0), 0)
    with pytest.raises(Exception):
        CubicOscSpec.parse(g="x + y")
