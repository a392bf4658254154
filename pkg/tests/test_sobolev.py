import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from jacsob.jacobi_core import JacobiParams, eigenvalue, pochhammer
from jacsob.quadrature import SampledFunction, SpectralCoefficients, build_grid, lp_norm, \
    random_test_function, synthesize
from jacsob.sobolev import (CounterexampleFunction, SobolevVariant, blowup_diagnostic,
                            check_exponent, counterexample_bounds_check, potential_norm,
                            sobolev_norm, window_grid)
from jacsob.spectral_ops import ConfigurationError

LEG = JacobiParams(0.0, 0.0)
EPS = 10.0 ** (-2 - np.arange(13) / 4)


def unit(params, n, N=None):
    return SpectralCoefficients.unit(params, n, N)


def test_variant_validation():
    with pytest.raises(ValueError):
        SobolevVariant("variable_index", 0, 2.0)
    with pytest.raises(ValueError):
        SobolevVariant("classical", 1, 2.0)


def test_check_exponent_reports_range():
    check_exponent(JacobiParams(-0.75, 0.0), 3.0)
    with pytest.raises(ConfigurationError, match="4"):
        check_exponent(JacobiParams(-0.75, 0.0), 5.0)


def test_sobolev_norm_examples():
    v = SobolevVariant("variable_index", 1, 2.0)
    assert_allclose(sobolev_norm(unit(LEG, 1), v), 1 + math.sqrt(2), rtol=1e-6)
    assert sobolev_norm(SpectralCoefficients(LEG, np.zeros(5)), v) == 0.0
    with pytest.raises(ConfigurationError):
        sobolev_norm(unit(JacobiParams(-0.9, -0.6), 1), SobolevVariant("variable_index", 1, 3.0))


@pytest.mark.parametrize("params", [LEG, JacobiParams(0.25, 0.25), JacobiParams(2.5, 0.7),
                                    JacobiParams(-0.75, 0.0)])
@pytest.mark.parametrize("n, m", [(3, 2), (6, 3), (2, 3)])
def test_sobolev_norm_unit_vectors(params, n, m):
    ab1 = params.alpha + params.beta + 1
    expected = sum(math.sqrt(pochhammer(n - k + 1, k) * pochhammer(n + ab1, k))
                   for k in range(m + 1))
    got = sobolev_norm(unit(params, n), SobolevVariant("variable_index", m, 2.0))
    assert_allclose(got, expected, rtol=1e-6)


def test_sobolev_norm_parts():
    parts = sobolev_norm(unit(LEG, 1), SobolevVariant("interlacing", 2, 2.0), parts=True)
    assert_allclose(parts, [1.0, math.sqrt(2), 2.0], rtol=1e-6)


@pytest.mark.parametrize("params", [LEG, JacobiParams(0.25, 0.25), JacobiParams(-0.9, -0.6)])
@pytest.mark.parametrize("n", [0, 1, 7])
@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_potential_norm_unit_vectors(params, n, s):
    assert_allclose(potential_norm(unit(params, n), s, 2.0), eigenvalue(params, n) ** (s / 2),
                    rtol=1e-6)


@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_potential_norm_bessel_case(s):
    # alpha + beta = -1 makes 0 an eigenvalue, so the Bessel variant is used
    p = JacobiParams(-0.25, -0.75)
    assert_allclose(potential_norm(unit(p, 0), s, 2.0), 1.0, rtol=1e-6)
    with pytest.raises(ConfigurationError):
        potential_norm(unit(p, 0), s, 2.0, kind="riesz")


def test_potential_norm_homogeneity():
    c = random_test_function(JacobiParams(0.3, 0.1), 40, 2)
    for p in (1.5, 2.0, 3.0):
        one = potential_norm(c, 1.0, p)
        two = potential_norm(c.scaled(2.0), 1.0, p)
        assert_allclose(two, 2 * one, rtol=1e-10)


def test_potential_norm_monotone_in_order():
    # ||f||_{p,s} <= C ||f||_{p,t} for t >= s; here lambda_n >= lambda_0 gives C = lambda_0^{(s-t)/2}
    params = JacobiParams(0.0, 0.0)
    for seed in range(5):
        c = random_test_function(params, 32, seed)
        low = potential_norm(c, 1.0, 2.0)
        high = potential_norm(c, 2.0, 2.0)
        assert low <= eigenvalue(params, 0) ** -0.5 * high * (1 + 1e-10)


def test_holder_between_exponents():
    params = JacobiParams(0.2, 0.4)
    grid = build_grid()
    for seed in range(5):
        g = synthesize(random_test_function(params, 32, seed), grid)
        for p, q in [(1.0, 2.0), (1.5, 4.0), (2.0, 7.0)]:
            assert lp_norm(g, p) <= math.pi ** (1 / p - 1 / q) * lp_norm(g, q) * (1 + 1e-12)


# truncated norms -----------------------------------------------------------------

def test_window_grid_has_breakpoints_at_epsilons():
    g = window_grid(EPS)
    for e in EPS:
        assert np.any(np.isclose(g.breakpoints, e, rtol=1e-14))
    assert_allclose(g.weights.sum(), math.pi, rtol=1e-12)


def test_blowup_constant_function():
    res = blowup_diagnostic(lambda t: np.ones_like(t), 2.0, EPS)
    assert abs(res.norm_slope) < 1e-2
    assert np.all(np.diff(res.norms) >= 0)
    assert_allclose(res.norms[-1], math.sqrt(math.pi), rtol=1e-3)


def test_blowup_inverse_theta():
    # int_eps theta^{-2} ~ eps^{-1}, so the norm behaves like eps^{-1/2}
    res = blowup_diagnostic(lambda t: 1 / t, 2.0, EPS)
    assert_allclose(res.norm_slope, -0.5, rtol=0.10)
    assert_allclose(res.power_slope, -1.0, rtol=0.10)


def test_blowup_counterexample_second_derivative():
    p = JacobiParams(0.25, 0.25)
    ce = CounterexampleFunction(p)
    res = blowup_diagnostic(ce.variable2, 1.2, 10.0 ** (-2 - np.arange(21) / 4))
    assert_allclose(res.power_slope, -1.1, rtol=0.15)
    assert_allclose(res.norm_slope, -1.1 / 1.2, rtol=0.15)


def test_blowup_integrable_function_converges():
    # theta^{-1/2} has a convergent L^1 tail: increments shrink like eps^{1/2}
    res = blowup_diagnostic(lambda t: t ** -0.5, 1.0, EPS)
    assert_allclose(res.power_slope, 0.5, rtol=0.05)
    assert res.relative_increments[-1] < 1e-2


def test_blowup_validation():
    with pytest.raises(ValueError):
        blowup_diagnostic(np.ones_like, 2.0, [0.1, 0.2])
    with pytest.raises(ValueError):
        blowup_diagnostic(np.ones_like, 2.0, [2.0, 0.1])
    with pytest.raises(ValueError):
        blowup_diagnostic(np.ones_like, 0.5, [0.1, 0.01])
    with pytest.raises(ValueError):
        blowup_diagnostic(np.ones_like, 2.0, [0.1])


# counterexample ------------------------------------------------------------------

def test_counterexample_values():
    p = JacobiParams(0.25, -0.5)
    ce = CounterexampleFunction(p)
    theta = np.linspace(0.1, 3.0, 5)
    expected = np.sin(theta / 2) ** 0.25 * np.cos(theta / 2) ** 1.0
    assert_allclose(ce(theta), expected, rtol=1e-14)
    with pytest.raises(ConfigurationError):
        CounterexampleFunction(JacobiParams(0.0, 0.3))


def test_interlaced_image_bounded_by_f():
    # D*D f stays within a constant multiple of f
    ce = CounterexampleFunction(JacobiParams(0.25, 0.25))
    theta = np.logspace(-12, np.log10(np.pi / 2), 200)
    ratio = np.abs(ce.interlaced2(theta)) / ce.f(theta)
    assert np.all(np.isfinite(ratio)) and ratio.max() < 10


@pytest.mark.parametrize("a, b", [(0.25, 0.25), (-0.3, 0.2), (0.1, -0.6)])
def test_bounds_check_passes(a, b):
    report = counterexample_bounds_check(JacobiParams(a, b))
    assert report.overall, [c.description for c in report.checks if not c.passed]
    assert len(report.checks) == 12


def test_bounds_check_rejects_zero_parameters():
    with pytest.raises(ConfigurationError):
        counterexample_bounds_check(JacobiParams(0.0, 0.25))


def test_blowup_accepts_sampled_style_callable():
    # a one-argument callable is evaluated on theta only
    calls = []

    def f(theta):
        calls.append(theta.shape)
        return np.ones_like(theta)

    blowup_diagnostic(f, 2.0, [0.1, 0.01, 0.001])
    assert len(calls) == 1
