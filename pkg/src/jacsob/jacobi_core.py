"""Jacobi polynomials, Jacobi trigonometric functions and the parameter algebra.

Everything lives on the interval (0, pi) with Lebesgue measure.  The basis
functions are

    phi_n(theta) = Psi(theta) * c_n * P_n(cos theta),
    Psi(theta)   = sin(theta/2)**(alpha + 1/2) * cos(theta/2)**(beta + 1/2),

which form an orthonormal system in L^2(0, pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

__all__ = [
    "JacobiParams",
    "ExponentRange",
    "pochhammer",
    "pochhammer_array",
    "jacobi_poly",
    "norm_constant",
    "half_angles",
    "log_psi",
    "psi",
    "phi",
    "phi_table",
    "eigenvalue",
    "critical_exponent",
    "exponent_range",
]


@dataclass(frozen=True)
class JacobiParams:
    """Type parameters (alpha, beta) of the Jacobi setting."""

    alpha: float
    beta: float
    A: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alpha, beta = float(self.alpha), float(self.beta)
        if not (math.isfinite(alpha) and alpha > -1):
            raise ValueError(f"alpha must be > -1, got {self.alpha!r}")
        if not (math.isfinite(beta) and beta > -1):
            raise ValueError(f"beta must be > -1, got {self.beta!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "A", (alpha + beta + 1) / 2)

    @property
    def zero_eigenvalue(self) -> bool:
        """True when alpha + beta = -1, i.e. lambda_0 = 0."""
        return self.alpha + self.beta == -1

    def shifted(self, k: int) -> "JacobiParams":
        return JacobiParams(self.alpha + k, self.beta + k)

    def swapped(self) -> "JacobiParams":
        return JacobiParams(self.beta, self.alpha)


@dataclass(frozen=True)
class ExponentRange:
    """Open exponent interval (lower, upper); ``upper`` may be ``math.inf``."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower >= 1:
            raise ValueError("lower exponent must be >= 1")
        if not self.lower < self.upper:
            raise ValueError("lower exponent must be below upper exponent")

    def __contains__(self, p) -> bool:
        return self.lower < p < self.upper

    def as_tuple(self):
        return (self.lower, self.upper)


def pochhammer(z: float, k: int) -> float:
    """Rising factorial (z)_k = z (z+1) ... (z+k-1), with (z)_0 = 1.

    Integer-valued ``z`` is multiplied out in exact integer arithmetic so that
    vanishing products come out as an exact zero.
    """
    k = int(k)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return 1.0
    if float(z).is_integer():
        z = int(z)
        return float(math.prod(range(z, z + k)))
    out = 1.0
    for j in range(k):
        out *= z + j
    return out


def pochhammer_array(z, k: int) -> np.ndarray:
    """Elementwise (z)_k for an array ``z``.

    For integer dtypes the product is formed in int64 (exact for the index
    ranges used here), then converted.
    """
    z = np.asarray(z)
    if np.issubdtype(z.dtype, np.integer):
        out = np.ones(z.shape, dtype=np.int64)
        for j in range(int(k)):
            out = out * (z + j)
        return out.astype(float)
    out = np.ones(z.shape, dtype=float)
    for j in range(int(k)):
        out = out * (z + j)
    return out


def jacobi_poly(params: JacobiParams, n: int, x):
    """Classical Jacobi polynomial P_n^(alpha, beta)(x) by the three-term recurrence."""
    a, b = params.alpha, params.beta
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1):
        raise ValueError("jacobi_poly is defined on [-1, 1]")
    if n < 0:
        raise ValueError("degree must be non-negative")
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = (a + 1) + (a + b + 2) * (x - 1) / 2
    for m in range(1, n):
        s = 2 * m + a + b
        c1 = 2 * (m + 1) * (m + a + b + 1) * s
        c2 = (s + 1) * (a * a - b * b)
        c3 = s * (s + 1) * (s + 2)
        c4 = 2 * (m + a) * (m + b) * (s + 2)
        p_prev, p = p, ((c2 + c3 * x) * p - c4 * p_prev) / c1
    return p if p.ndim else float(p)


def _log_norm_constant(a: float, b: float, n):
    n = np.asarray(n, dtype=float)
    # n = 0 is written via Gamma(a+b+2) so that a + b = -1 needs no limit.
    m = np.where(n > 0, n, 1.0)
    general = (np.log(2 * m + a + b + 1) + gammaln(m + 1) + gammaln(m + a + b + 1)
               - gammaln(m + a + 1) - gammaln(m + b + 1))
    first = gammaln(a + b + 2) - gammaln(a + 1) - gammaln(b + 1)
    return 0.5 * np.where(n > 0, general, first)


def norm_constant(params: JacobiParams, n: int) -> float:
    """Positive c_n with int_0^pi (Psi c_n P_n(cos theta))^2 dtheta = 1."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    return float(np.exp(_log_norm_constant(params.alpha, params.beta, n)))


def half_angles(theta, comp=None):
    """Return (sin(theta/2), cos(theta/2)) accurate near both endpoints.

    ``comp`` is pi - theta when the caller knows it exactly (grid nodes do);
    near theta = pi the cosine is then taken as sin(comp/2).
    """
    theta = _as_real(theta)
    pi = _pi(theta.dtype)
    comp = pi - theta if comp is None else np.asarray(comp, dtype=theta.dtype)
    right = theta > pi / 2
    s = np.where(right, np.cos(comp / 2), np.sin(theta / 2))
    c = np.where(right, np.sin(comp / 2), np.cos(theta / 2))
    return s, c


def _as_real(x):
    """float64 array, except that long double input stays long double."""
    x = np.asarray(x)
    return x if x.dtype == np.longdouble else x.astype(float)


def _pi(dtype):
    if dtype == np.longdouble:
        return np.arccos(np.longdouble(-1))
    return np.pi


def _check_open_interval(theta, comp=None):
    # with an explicit complement, theta may round to pi while pi - theta > 0
    below_pi = theta < _pi(theta.dtype) if comp is None else np.asarray(comp) > 0
    if np.any(~(theta > 0)) or np.any(~below_pi):
        raise ValueError("theta must lie in the open interval (0, pi)")
    return theta


def log_psi(params: JacobiParams, theta, comp=None):
    s, c = half_angles(theta, comp)
    with np.errstate(divide="ignore"):
        return (params.alpha + 0.5) * np.log(s) + (params.beta + 0.5) * np.log(c)


def psi(params: JacobiParams, theta, comp=None):
    """Psi^(alpha,beta)(theta) = sin(theta/2)^(alpha+1/2) cos(theta/2)^(beta+1/2)."""
    theta = np.asarray(theta, dtype=float)
    at_zero = theta == 0
    at_pi = (theta == np.pi) if comp is None else (np.asarray(comp) == 0)
    if (np.any(at_zero) and params.alpha + 0.5 <= 0) or (np.any(at_pi) and params.beta + 0.5 <= 0):
        raise ValueError("Psi is singular at this endpoint for the given parameters")
    if np.any(theta < 0) or np.any(theta > np.pi):
        raise ValueError("theta must lie in [0, pi]")
    out = np.exp(log_psi(params, theta, comp))
    return out if out.ndim else float(out)


def phi_table(params: JacobiParams, N: int, theta, comp=None) -> np.ndarray:
    """Rows phi_0 .. phi_{N-1} evaluated at ``theta``; shape (N,) + theta.shape.

    Uses the recurrence for polynomials orthonormal with respect to
    (1-x)^alpha (1+x)^beta, which stays bounded for large n.
    """
    a, b = params.alpha, params.beta
    theta = _as_real(theta)
    out = np.zeros((N,) + theta.shape, dtype=theta.dtype)
    if N <= 0:
        return out
    x = np.cos(theta)
    # 2^{(a+b+1)/2} converts the dx-orthonormal polynomials to the dtheta setting.
    scale = np.exp(log_psi(params, theta, comp) + 0.5 * (a + b + 1) * np.log(theta.dtype.type(2)))
    log_mu0 = (a + b + 1) * np.log(2.0) + gammaln(a + 1) + gammaln(b + 1) - gammaln(a + b + 2)
    q_prev = np.zeros_like(x)
    q = np.full_like(x, np.exp(-0.5 * log_mu0))
    out[0] = scale * q
    if N == 1:
        return out
    a_prev = 0.0
    for n in range(0, N - 1):
        s = 2 * n + a + b
        if n == 0:
            b_n = (b - a) / (a + b + 2)
            a_next = 2.0 / (a + b + 2) * math.sqrt((a + 1) * (b + 1) / (a + b + 3))
        else:
            b_n = (b * b - a * a) / (s * (s + 2))
            m = n + 1
            t = 2 * m + a + b
            a_next = 2.0 / t * math.sqrt(m * (m + a) * (m + b) * (m + a + b) / ((t - 1) * (t + 1)))
        q_prev, q = q, ((x - b_n) * q - a_prev * q_prev) / a_next
        a_prev = a_next
        out[n + 1] = scale * q
    return out


def phi(params: JacobiParams, n: int, theta, comp=None):
    """Jacobi trigonometric function phi_n^(alpha,beta); zero for n < 0."""
    theta = _as_real(theta)
    _check_open_interval(theta, comp)
    if n < 0:
        out = np.zeros_like(theta)
    else:
        out = phi_table(params, n + 1, theta, comp)[n]
    return out if out.ndim else float(out)


def eigenvalue(params: JacobiParams, n) -> float:
    """lambda_n = (n + A)^2."""
    return (np.asarray(n, dtype=float) + params.A) ** 2 if np.ndim(n) else float((n + params.A) ** 2)


def critical_exponent(params: JacobiParams) -> float:
    """p(alpha, beta): infinity when both parameters are >= -1/2."""
    low = min(params.alpha, params.beta) + 0.5
    if low >= 0:
        return math.inf
    return -1.0 / low


def exponent_range(params: JacobiParams) -> ExponentRange:
    """E(alpha, beta) as an open interval (p', p)."""
    upper = critical_exponent(params)
    if math.isinf(upper):
        return ExponentRange(1.0, math.inf)
    return ExponentRange(upper / (upper - 1.0), upper)
