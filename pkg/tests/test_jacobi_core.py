import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from jacsob.jacobi_core import (ExponentRange, JacobiParams, critical_exponent, eigenvalue,
                                exponent_range, jacobi_poly, norm_constant, phi, phi_table,
                                pochhammer, pochhammer_array, psi)
from jacsob.quadrature import build_grid, integrate, SampledFunction

params_strategy = st.tuples(
    st.floats(-0.95, 3.0, allow_nan=False),
    st.floats(-0.95, 3.0, allow_nan=False),
).map(lambda ab: JacobiParams(*ab))


def test_params_validation():
    with pytest.raises(ValueError):
        JacobiParams(-1.0, 0.0)
    with pytest.raises(ValueError):
        JacobiParams(0.0, float("nan"))
    p = JacobiParams(0, 1)
    assert p.alpha == 0.0 and isinstance(p.alpha, float)
    assert p.A == 1.0
    assert JacobiParams(0.0, -0.5).shifted(2) == JacobiParams(2.0, 1.5)
    assert JacobiParams(0.3, 0.1).swapped() == JacobiParams(0.1, 0.3)
    assert JacobiParams(-0.25, -0.75).zero_eigenvalue


@pytest.mark.parametrize("z, k, expected", [(5.0, 0, 1.0), (3.0, 2, 12.0), (1.0, 4, 24.0),
                                            (0.5, 3, 0.5 * 1.5 * 2.5)])
def test_pochhammer_examples(z, k, expected):
    assert pochhammer(z, k) == expected


def test_pochhammer_vanishing_is_exact():
    # (n-k+1)_k vanishes for n < k
    for k in range(1, 6):
        for n in range(k):
            assert pochhammer(n - k + 1, k) == 0.0
    assert_allclose(pochhammer_array(np.arange(-3, 1), 4), [0, 0, 0, 0])
    with pytest.raises(ValueError):
        pochhammer(1.0, -1)


@given(st.floats(-5, 5), st.integers(0, 8))
def test_pochhammer_matches_sympy(z, k):
    expected = float(sp.rf(sp.Rational(z), k))
    assert_allclose(pochhammer(z, k), expected, rtol=1e-12, atol=1e-12)


def test_jacobi_poly_examples():
    assert jacobi_poly(JacobiParams(0.7, 2.1), 0, 0.3) == 1.0
    assert_allclose(jacobi_poly(JacobiParams(1.0, 0.0), 2, 1.0), 3.0, rtol=1e-14)
    # Chebyshev case: P_3^(-1/2,-1/2)(cos t) = P_3(1) cos(3t)
    p = JacobiParams(-0.5, -0.5)
    t = 0.7
    assert_allclose(jacobi_poly(p, 3, math.cos(t)), jacobi_poly(p, 3, 1.0) * math.cos(3 * t),
                    rtol=1e-13)
    with pytest.raises(ValueError):
        jacobi_poly(p, 2, 1.5)


@pytest.mark.parametrize("a, b", [("0", "0"), ("1", "0"), ("1/4", "-3/4"), ("5/2", "7/10")])
@pytest.mark.parametrize("n", [1, 2, 5])
def test_jacobi_poly_matches_sympy(a, b, n):
    a, b = sp.Rational(a), sp.Rational(b)
    x = sp.Symbol("x")
    poly = sp.jacobi(n, a, b, x)
    for xv in (-0.9, -0.2, 0.35, 0.8):
        expected = float(poly.subs(x, sp.Rational(xv).limit_denominator(1000)))
        got = jacobi_poly(JacobiParams(float(a), float(b)), n,
                          float(sp.Rational(xv).limit_denominator(1000)))
        assert_allclose(got, expected, rtol=1e-12, atol=1e-13)


def test_jacobi_poly_endpoint_identity():
    # P_n(1) = binom(n + alpha, n)
    for a, b in [(1.0, 0.0), (0.5, 2.0), (-0.3, 0.4)]:
        for n in range(7):
            expected = math.gamma(n + a + 1) / (math.gamma(n + 1) * math.gamma(a + 1))
            assert_allclose(jacobi_poly(JacobiParams(a, b), n, 1.0), expected, rtol=1e-12)


@pytest.mark.parametrize("n", range(6))
def test_phi_reduces_to_trig(n):
    theta = np.linspace(0.1, 3.0, 7)
    cheb = math.sqrt((1 if n == 0 else 2) / math.pi) * np.cos(n * theta)
    assert_allclose(phi(JacobiParams(-0.5, -0.5), n, theta), cheb, rtol=1e-12, atol=1e-14)
    sine = math.sqrt(2 / math.pi) * np.sin((n + 1) * theta)
    assert_allclose(phi(JacobiParams(0.5, 0.5), n, theta), sine, rtol=1e-12, atol=1e-14)


def test_norm_constant_chebyshev():
    # phi_n = sqrt(2/pi) cos(n theta) with P_n(1) c_n = sqrt(2/pi)
    p = JacobiParams(-0.5, -0.5)
    assert_allclose(norm_constant(p, 0), 1 / math.sqrt(math.pi), rtol=1e-14)
    assert_allclose(norm_constant(p, 3) * jacobi_poly(p, 3, 1.0), math.sqrt(2 / math.pi), rtol=1e-13)
    assert_allclose(norm_constant(JacobiParams(0.5, 0.5), 0) * psi(JacobiParams(0.5, 0.5), math.pi / 2),
                    math.sqrt(2 / math.pi), rtol=1e-14)
    with pytest.raises(ValueError):
        norm_constant(p, -1)


def test_norm_constant_zero_eigenvalue_case():
    # a + b = -1 is handled without a limit at n = 0
    p = JacobiParams(-0.25, -0.75)
    c0 = norm_constant(p, 0)
    g = build_grid()
    vals = (psi(p, g.nodes, g.comp) * c0) ** 2
    assert_allclose(integrate(SampledFunction(g, vals)), 1.0, rtol=1e-10)


@pytest.mark.parametrize("a, b, theta, expected", [
    (-0.5, -0.5, 1.1, 1.0),
    (0.5, 0.5, math.pi / 2, 0.5),
    (1.5, -0.5, math.pi / 3, 0.25),
])
def test_psi_examples(a, b, theta, expected):
    assert_allclose(psi(JacobiParams(a, b), theta), expected, rtol=1e-14)


def test_psi_singular_endpoint_rejected():
    with pytest.raises(ValueError):
        psi(JacobiParams(-0.75, 0.0), 0.0)
    assert psi(JacobiParams(0.0, 0.0), 0.0) == 0.0


def test_phi_examples():
    p = JacobiParams(-0.5, -0.5)
    assert_allclose(phi(p, 2, 0.4), math.sqrt(2 / math.pi) * math.cos(0.8), rtol=1e-14)
    assert phi(JacobiParams(0.3, 1.2), -1, 0.7) == 0.0
    assert abs(phi(JacobiParams(0.5, 0.5), 1, math.pi / 2)) < 1e-15


def test_phi_matches_closed_form_definition():
    for a, b in [(0.0, 0.0), (2.5, 0.7), (-0.9, -0.6)]:
        p = JacobiParams(a, b)
        theta = np.linspace(0.05, 3.05, 11)
        for n in (0, 1, 4, 9):
            direct = psi(p, theta) * norm_constant(p, n) * jacobi_poly(p, n, np.cos(theta))
            assert_allclose(phi(p, n, theta), direct, rtol=1e-11, atol=1e-13)


def test_phi_table_accepts_complement():
    p = JacobiParams(1.2, 0.6)
    theta = np.array([1e-9, 0.5, math.pi - 1e-9])
    comp = np.array([math.pi - 1e-9, math.pi - 0.5, 1e-9])
    t1 = phi_table(p, 6, theta, comp)
    assert np.all(np.isfinite(t1))
    # near pi, phi_0 behaves like (pi - theta)^(beta + 1/2) with beta + 1/2 > 0
    assert 0 < t1[0, 2] < 1e-3 * t1[0, 1]
    # the complement argument is used as given
    assert_allclose(phi_table(p, 6, theta[1:2]), t1[:, 1:2], rtol=1e-14)


@settings(max_examples=20, deadline=None)
@given(params_strategy)
def test_reflection_symmetry(p):
    # phi_n^{ab}(pi - theta) = (-1)^n phi_n^{ba}(theta)
    theta = np.linspace(0.1, 3.0, 9)
    t1 = phi_table(p, 6, np.pi - theta)
    t2 = phi_table(p.swapped(), 6, theta)
    signs = (-1.0) ** np.arange(6)
    assert_allclose(t1, signs[:, None] * t2, rtol=1e-9, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(params_strategy)
def test_orthonormality_property(p):
    g = build_grid()
    table = phi_table(p, 12, g.nodes, g.comp)
    gram = (table * g.weights) @ table.T
    assert_allclose(gram, np.eye(12), atol=1e-9)


def test_uniform_bound_constant_is_stable():
    # |phi_n(theta)| <= C for theta away from the endpoints, with C not growing in n
    p = JacobiParams(1.5, 0.5)
    theta = np.linspace(0.3, math.pi - 0.3, 401)
    table = phi_table(p, 201, theta)
    sup = np.abs(table).max(axis=1)
    c_low = sup[10:50].max()
    c_high = sup[150:201].max()
    assert c_high <= 2 * c_low


@pytest.mark.parametrize("a, b, n, expected", [(-0.5, -0.5, 3, 9.0), (0.0, 0.0, 0, 0.25)])
def test_eigenvalue_examples(a, b, n, expected):
    assert_allclose(eigenvalue(JacobiParams(a, b), n), expected, atol=1e-15)


def test_eigenvalue_zero_when_a_plus_b_is_minus_one():
    assert eigenvalue(JacobiParams(-0.25, -0.75), 0) == 0.0
    assert_allclose(eigenvalue(JacobiParams(0.0, 0.0), np.arange(3)), [0.25, 2.25, 6.25])


@pytest.mark.parametrize("a, b, expected", [(0.0, 2.0, math.inf), (-0.75, 0.0, 4.0),
                                            (-0.9, -0.6, 2.5), (-0.5, -0.5, math.inf)])
def test_critical_exponent_examples(a, b, expected):
    assert_allclose(critical_exponent(JacobiParams(a, b)), expected, rtol=1e-12)


@pytest.mark.parametrize("a, b, expected", [(0.0, 0.0, (1.0, math.inf)),
                                            (-0.75, 0.0, (4 / 3, 4.0)),
                                            (-0.9, -0.6, (5 / 3, 2.5))])
def test_exponent_range_examples(a, b, expected):
    rng = exponent_range(JacobiParams(a, b))
    assert_allclose(rng.as_tuple(), expected, rtol=1e-12)


@given(params_strategy)
def test_exponent_range_is_conjugate_symmetric(p):
    rng = exponent_range(p)
    if math.isinf(rng.upper):
        assert rng.lower == 1.0
    else:
        assert_allclose(1 / rng.lower + 1 / rng.upper, 1.0, rtol=1e-12)
        assert 2.0 in rng


def test_exponent_range_validation():
    with pytest.raises(ValueError):
        ExponentRange(0.5, 2.0)
    with pytest.raises(ValueError):
        ExponentRange(3.0, 2.0)
    assert 4.0 not in ExponentRange(4 / 3, 4.0)
