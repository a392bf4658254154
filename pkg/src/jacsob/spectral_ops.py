"""Spectral multipliers with index shift and basis change, and the operators built on them.

Every operator here acts on coefficient vectors: derivatives of both kinds,
their adjoints, Riesz and Bessel potentials, Poisson integrals, higher order
Riesz transforms and the inversion operators.  Functions are only sampled at
the edges (``synthesize``), so algebraic identities between operators hold to
floating-point rounding, not quadrature accuracy.

The pointwise route (finite differences plus the exact cot/tan terms) is kept
separate and serves as an independent check of the spectral formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .jacobi_core import JacobiParams, phi_table, pochhammer_array
from .quadrature import (QuadratureGrid, SampledFunction, SpectralCoefficients,
                         basis_table, synthesize)

__all__ = [
    "ConfigurationError",
    "MultiplierOp",
    "DerivativeKind",
    "apply_multiplier",
    "derivative_op",
    "derivative_spectral",
    "adjoint_op",
    "adjoint_spectral",
    "potential",
    "potential_inverse",
    "poisson",
    "riesz_transform",
    "riesz_inverse_T",
    "as_callable",
    "pointwise_operator",
    "derivative_pointwise",
    "variable_index_pointwise",
    "interlacing_pointwise",
    "maximal_estimate",
    "default_r_values",
    "kernel_eval",
    "kernel_terms_needed",
]


class ConfigurationError(ValueError):
    """Invalid parameter combination for an operator."""


@dataclass(frozen=True)
class MultiplierOp:
    """f -> sum_n g(n) a_n^{source}(f) phi_{n+shift}^{target}."""

    source: JacobiParams
    target: JacobiParams
    shift: int
    g: Callable[[np.ndarray], np.ndarray]

    def values(self, N: int) -> np.ndarray:
        return np.asarray(self.g(np.arange(N)), dtype=float)

    def then(self, other: "MultiplierOp") -> "MultiplierOp":
        """Composition ``other`` after ``self``."""
        if other.source != self.target:
            raise ConfigurationError("basis mismatch in multiplier composition")
        first, second, d = self.g, other.g, self.shift

        def g(n):
            n = np.asarray(n)
            return first(n) * second(np.maximum(n + d, 0)) * (n + d >= 0)

        return MultiplierOp(self.source, other.target, self.shift + other.shift, g)


@dataclass(frozen=True)
class DerivativeKind:
    variant: str
    order: int

    def __post_init__(self):
        if self.variant not in ("variable_index", "interlacing"):
            raise ValueError(f"unknown derivative variant {self.variant!r}")
        if int(self.order) != self.order or self.order < 0:
            raise ValueError("derivative order must be a non-negative integer")


def apply_multiplier(op: MultiplierOp, c: SpectralCoefficients) -> SpectralCoefficients:
    if c.params != op.source:
        raise ConfigurationError(
            f"coefficients are in basis {c.params}, operator expects {op.source}")
    N = c.N
    d = op.shift
    out = np.zeros(c.coeffs.shape[:-1] + (N + max(d, 0),))
    gv = op.values(N)
    lo = max(0, -d)
    if lo < N:
        out[..., lo + d:N + d] = gv[lo:] * c.coeffs[..., lo:]
    # adding +0.0 turns the -0.0 from negative multipliers into +0.0
    return SpectralCoefficients(op.target, out + 0.0)


# derivatives -----------------------------------------------------------------

def _vi_surd(n, k, ab1):
    """sqrt((n-k+1)_k (n+alpha+beta+1)_k), exactly zero for n < k."""
    n = np.asarray(n)
    first = pochhammer_array(n - k + 1, k)
    second = pochhammer_array(n + ab1, k)
    return np.sqrt(np.where(first > 0, first * second, 0.0))


def derivative_op(params: JacobiParams, kind: DerivativeKind) -> MultiplierOp:
    k = kind.order
    ab1 = params.alpha + params.beta + 1
    sign = (-1.0) ** k
    if kind.variant == "variable_index":
        return MultiplierOp(params, params.shifted(k), -k,
                            lambda n: sign * _vi_surd(n, k, ab1))
    # interlacing: [n (n + a + b + 1)]^{k/2}
    def g(n):
        n = np.asarray(n, dtype=float)
        return sign * (n * (n + ab1)) ** (k / 2)

    if k % 2 == 0:
        return MultiplierOp(params, params, 0, g)
    return MultiplierOp(params, params.shifted(1), -1, g)


def derivative_spectral(kind: DerivativeKind, c: SpectralCoefficients) -> SpectralCoefficients:
    return apply_multiplier(derivative_op(c.params, kind), c)


def adjoint_op(base: JacobiParams, k: int, j: int | None = None) -> MultiplierOp:
    """(D^{(k,j)})^*: basis (a+k, b+k) -> (a+k-j, b+k-j), shift +j; j = k is (D^{(k)})^*."""
    j = k if j is None else j
    if not 0 <= j <= k:
        raise ValueError("need 0 <= j <= k")
    ab1 = base.alpha + base.beta + 1
    sign = (-1.0) ** j

    def g(n):
        n = np.asarray(n)
        return sign * np.sqrt(pochhammer_array(n + 1, j) * pochhammer_array(n + 2 * k - j + ab1, j))

    return MultiplierOp(base.shifted(k), base.shifted(k - j), j, g)


def adjoint_spectral(k: int, c: SpectralCoefficients, base: JacobiParams | None = None,
                     j: int | None = None) -> SpectralCoefficients:
    """Apply (D^{(k)})^* (or the partial (D^{(k,j)})^*) to coefficients in basis (a+k, b+k)."""
    if base is None:
        base = JacobiParams(c.params.alpha - k, c.params.beta - k)
    return apply_multiplier(adjoint_op(base, k, j), c)


# potentials and semigroups --------------------------------------------------

def _kind_for(params, kind):
    if kind is None:
        return "bessel" if params.zero_eigenvalue else "riesz"
    if kind not in ("riesz", "bessel"):
        raise ConfigurationError(f"unknown potential kind {kind!r}")
    if kind == "riesz" and params.zero_eigenvalue:
        raise ConfigurationError(
            "alpha + beta = -1 makes 0 an eigenvalue; use the bessel potential instead")
    return kind


def potential_op(params: JacobiParams, power: float, kind: str | None = None) -> MultiplierOp:
    """Diagonal lambda_n**power (riesz) or (1 + lambda_n)**power (bessel)."""
    kind = _kind_for(params, kind)
    A = params.A
    if kind == "riesz":
        return MultiplierOp(params, params, 0, lambda n: np.abs(np.asarray(n) + A) ** (2 * power))
    return MultiplierOp(params, params, 0, lambda n: (1 + (np.asarray(n) + A) ** 2) ** power)


def potential(c: SpectralCoefficients, sigma: float, kind: str | None = None) -> SpectralCoefficients:
    """L^{-sigma} (riesz) or (1 + L)^{-sigma} (bessel)."""
    if not sigma > 0:
        raise ConfigurationError("sigma must be positive")
    return apply_multiplier(potential_op(c.params, -sigma, kind), c)


def potential_inverse(c: SpectralCoefficients, s: float, kind: str | None = None) -> SpectralCoefficients:
    """L^{s/2} (riesz) or (1 + L)^{s/2} (bessel); inverse of the potential of order s/2."""
    if not s > 0:
        raise ConfigurationError("s must be positive")
    return apply_multiplier(potential_op(c.params, s / 2, kind), c)


POISSON_MODES = ("semigroup", "integral", "spectral_integral", "tail")


def poisson_op(params: JacobiParams, mode: str, value: float, l: int | None = None) -> MultiplierOp:
    A = params.A
    if mode == "semigroup":
        t = value
        if not t > 0:
            raise ConfigurationError("semigroup time t must be positive")
        return MultiplierOp(params, params, 0, lambda n: np.exp(-t * np.abs(np.asarray(n) + A)))
    if mode not in POISSON_MODES:
        raise ConfigurationError(f"unknown Poisson mode {mode!r}")
    r = value
    if not 0 < r < 1:
        raise ConfigurationError("r must lie in (0, 1)")
    if mode == "integral":
        return MultiplierOp(params, params, 0, lambda n: r ** np.asarray(n, dtype=float))
    if mode == "spectral_integral":
        return MultiplierOp(params, params, 0, lambda n: r ** np.abs(np.asarray(n) + A))
    if l is None or l < 0:
        raise ConfigurationError("tail mode needs l >= 0")
    return MultiplierOp(params, params, 0,
                        lambda n: np.where(np.asarray(n) > l, r ** np.abs(np.asarray(n) + A), 0.0))


def poisson(c: SpectralCoefficients, mode: str, value: float, l: int | None = None) -> SpectralCoefficients:
    """H_t (semigroup), U_r (integral), U~_r (spectral_integral) or the tail U~_{r,l}."""
    return apply_multiplier(poisson_op(c.params, mode, value, l), c)


# Riesz transforms -----------------------------------------------------------

RIESZ_KINDS = ("R1", "R2", "R1_tilde", "R2_tilde")


def riesz_op(base: JacobiParams, k: int, which: str) -> MultiplierOp:
    """Higher order Riesz transforms relative to the basis (a, b) = ``base``.

    R1 maps basis (a, b) to (a+k, b+k); R2 maps (a+k, b+k) back to (a, b).
    """
    if which not in RIESZ_KINDS:
        raise ConfigurationError(f"unknown Riesz transform {which!r}")
    tilde = which.endswith("_tilde")
    # R1 stays defined when lambda_0 = 0: its surd vanishes for n < k, so the
    # multiplier is taken as 0 there; R2 keeps the stated restriction
    if not tilde and base.zero_eigenvalue and which == "R2":
        raise ConfigurationError(
            f"{which} needs alpha + beta != -1; use {which}_tilde (Bessel variant)")
    A = base.A
    if which.startswith("R1"):
        deriv = derivative_op(base, DerivativeKind("variable_index", k))
        if tilde:
            damp = lambda n: (1 + (np.asarray(n) + A) ** 2) ** (-k / 2)
        else:
            def damp(n):
                n = np.asarray(n)
                return np.where(n >= k, np.abs(np.where(n >= k, n, k) + A) ** (-k), 0.0)
        return MultiplierOp(base, base.shifted(k), -k, lambda n: deriv.g(n) * damp(n))
    adj = adjoint_op(base, k)
    if tilde:
        damp = lambda n: (1 + (np.asarray(n) + k + A) ** 2) ** (-k / 2)
    else:
        damp = lambda n: np.abs(np.asarray(n) + k + A) ** (-k)
    return MultiplierOp(base.shifted(k), base, k, lambda n: adj.g(n) * damp(n))


def riesz_transform(c: SpectralCoefficients, k: int, which: str,
                    base: JacobiParams | None = None) -> SpectralCoefficients:
    """R^{k,1}, R^{k,2} and their Bessel (tilde) variants.

    R2 variants take coefficients in basis (a+k, b+k); pass ``base`` = (a, b)
    to avoid recovering it by subtraction.
    """
    if which not in RIESZ_KINDS:
        raise ConfigurationError(f"unknown Riesz transform {which!r}")
    if which.startswith("R1"):
        base = c.params
    elif base is None:
        base = JacobiParams(c.params.alpha - k, c.params.beta - k)
    return apply_multiplier(riesz_op(base, k, which), c)


def riesz_inverse_T(c: SpectralCoefficients, k: int, tilde: bool = False) -> SpectralCoefficients:
    """T^k (or T~^k): inverse of R^{k,2} R^{k,1} on {a_n = 0 for n < k}."""
    params = c.params
    if not tilde and params.zero_eigenvalue:
        raise ConfigurationError("T^k needs alpha + beta != -1; use the tilde variant")
    A = params.A
    ab1 = params.alpha + params.beta + 1

    def g(n):
        n = np.asarray(n)
        den = pochhammer_array(n - k + 1, k) * pochhammer_array(n + ab1, k)
        num = (1 + (n + A) ** 2) ** k if tilde else (n + A) ** (2 * k)
        return np.where(n >= k, num / np.where(n >= k, den, 1.0), 0.0)

    return apply_multiplier(MultiplierOp(params, params, 0, g), c)


# pointwise route ------------------------------------------------------------

FD_STEP = 1e-4 * math.pi
_FD7 = ((1, 45.0), (2, -9.0), (3, 1.0))


def as_callable(f):
    """Turn coefficients into a vectorised evaluator that keeps long double input."""
    if callable(f):
        return f
    if isinstance(f, SpectralCoefficients):
        params, coeffs = f.params, f.coeffs

        def evaluate(theta):
            table = phi_table(params, f.N, theta)
            return np.matmul(coeffs.astype(table.dtype), table)

        return evaluate
    raise TypeError("expected a callable or SpectralCoefficients")


def pointwise_operator(f, params: JacobiParams, mode: str = "D", h: float = FD_STEP):
    """Evaluator of D f or D^* f, with d/dtheta by a 7-point central difference."""
    if mode not in ("D", "D_star"):
        raise ValueError("mode must be 'D' or 'D_star'")
    f = as_callable(f)
    cot_coef = (2 * params.alpha + 1) / 4
    tan_coef = (2 * params.beta + 1) / 4
    sign = 1.0 if mode == "D" else -1.0

    def out(theta):
        step = np.asarray(h, dtype=np.asarray(theta).dtype)
        deriv = sum(c * (f(theta + j * step) - f(theta - j * step)) for j, c in _FD7) / (60 * step)
        value = f(theta)
        half = theta / 2
        return sign * deriv + (-cot_coef / np.tan(half) + tan_coef * np.tan(half)) * value

    return out


def _sample_interior(evaluator, grid: QuadratureGrid, reach: float) -> SampledFunction:
    reliable = grid.interior_mask() & (grid.nodes - reach > 0) & (grid.comp - reach > 0)
    theta = grid.nodes[reliable].astype(np.longdouble)
    vals = np.asarray(evaluator(theta), dtype=float)
    out = np.zeros(vals.shape[:-1] + (len(grid),))
    out[..., reliable] = vals
    return SampledFunction(grid, out, reliable)


def derivative_pointwise(f, params: JacobiParams, mode: str, grid: QuadratureGrid,
                         h: float = FD_STEP) -> SampledFunction:
    """Numerical D_{ab} f or D*_{ab} f on the grid.

    ``f`` is a vectorised callable or SpectralCoefficients, evaluated at the
    stencil points in long double.  Nodes outside the grid's uniform bulk are
    zeroed and marked False in the ``reliable`` attribute of the result.
    """
    if int(grid.interior_mask().sum()) < 5:
        raise ConfigurationError("grid too coarse for finite differencing")
    return _sample_interior(pointwise_operator(f, params, mode, h), grid, 3 * h)


def variable_index_pointwise(f, params: JacobiParams, k: int, grid: QuadratureGrid,
                             h: float = FD_STEP) -> SampledFunction:
    """D^{(k)} = D_{a+k-1,b+k-1} o ... o D_{a,b} by nested differencing."""
    g = as_callable(f)
    for j in range(k):
        g = pointwise_operator(g, params.shifted(j), "D", h)
    return _sample_interior(g, grid, 3 * k * h)


def interlacing_pointwise(f, params: JacobiParams, k: int, grid: QuadratureGrid,
                          h: float = FD_STEP) -> SampledFunction:
    """... D D^* D (k factors, D applied first) by nested differencing."""
    g = as_callable(f)
    for j in range(k):
        g = pointwise_operator(g, params, "D" if j % 2 == 0 else "D_star", h)
    return _sample_interior(g, grid, 3 * k * h)


# maximal functions ----------------------------------------------------------

MAXIMAL_FAMILIES = ("U_r", "U_r_spectral", "H_t", "partial_sums")


def default_r_values(levels: int = 20) -> np.ndarray:
    """Geometric sampling r = 1 - 2^{-j}, j = 1..levels."""
    return 1.0 - 2.0 ** -np.arange(1, levels + 1)


def maximal_estimate(c: SpectralCoefficients, family: str, grid: QuadratureGrid,
                     sampling=None) -> SampledFunction:
    """Pointwise max of |T f| over a sampled operator family.

    For U_r / U_r_spectral ``sampling`` holds r values, for H_t it holds t
    values (default t = -log r), for partial_sums the truncation indices N.
    The result bounds the true maximal function from below.
    """
    if family not in MAXIMAL_FAMILIES:
        raise ConfigurationError(f"unknown maximal family {family!r}")
    if sampling is None:
        r = default_r_values()
        sampling = {"H_t": -np.log(r), "partial_sums": np.arange(c.N)}.get(family, r)
    sampling = np.atleast_1d(np.asarray(sampling))
    if sampling.size == 0:
        raise ConfigurationError("empty parameter family")
    table = basis_table(c.params, c.N, grid)
    best = np.zeros(c.coeffs.shape[:-1] + (len(grid),))
    if family == "partial_sums":
        partial = np.zeros_like(best)
        stops = set(int(v) for v in sampling)
        if min(stops) < 0:
            raise ConfigurationError("partial sum indices must be >= 0")
        for n in range(min(c.N, max(stops) + 1)):
            partial = partial + c.coeffs[..., n, None] * table[n]
            if n in stops:
                best = np.maximum(best, np.abs(partial))
        if max(stops) >= c.N:
            best = np.maximum(best, np.abs(partial))
        return SampledFunction(grid, best)
    mode = {"U_r": "integral", "U_r_spectral": "spectral_integral", "H_t": "semigroup"}[family]
    for value in sampling:
        vals = synthesize(poisson(c, mode, float(value)), grid).values
        best = np.maximum(best, np.abs(vals))
    return SampledFunction(grid, best)


# Poisson kernel -------------------------------------------------------------

def kernel_terms_needed(params: JacobiParams, r: float, tol: float = 1e-12) -> int:
    """Smallest N with r^N N^{2(a+b+2)+1} < tol."""
    expo = 2 * (params.alpha + params.beta + 2) + 1
    N = 1
    while N * math.log(r) + expo * math.log(N) >= math.log(tol):
        N = int(N * 1.25) + 1
    lo, hi = max(1, int(N / 1.25) - 1), N
    while lo < hi:
        mid = (lo + hi) // 2
        if mid * math.log(r) + expo * math.log(mid) < math.log(tol):
            hi = mid
        else:
            lo = mid + 1
    return lo


def kernel_eval(params: JacobiParams, r: float, theta, varphi, N: int):
    """Truncated Poisson-Jacobi kernel sum_{n<N} r^n phi_n(theta) phi_n(varphi)."""
    if not 0 < r < 1:
        raise ConfigurationError("r must lie in (0, 1)")
    need = kernel_terms_needed(params, r)
    if N < need:
        raise ConfigurationError(f"N = {N} too small for r = {r}; need N >= {need}")
    theta = np.asarray(theta, dtype=float)
    varphi = np.asarray(varphi, dtype=float)
    ta = phi_table(params, N, theta)
    tb = phi_table(params, N, varphi)
    weights = r ** np.arange(N, dtype=float)
    out = np.zeros(np.broadcast_shapes(theta.shape, varphi.shape))
    for n in range(N):
        out = out + weights[n] * (ta[n] * tb[n])
    return out if out.ndim else float(out)
