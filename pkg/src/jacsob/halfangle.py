"""Exact calculus on sums of half-angle monomials sin(theta/2)^u cos(theta/2)^v.

The span of such monomials is closed under d/dtheta, D_{ab} and D*_{ab}:

    d/dtheta s^u c^v = (u/2) s^{u-1} c^{v+1} - (v/2) s^{u+1} c^{v-1}
    D_{ab}   s^u c^v = ((u-a-1/2)/2) s^{u-1} c^{v+1} - ((v-b-1/2)/2) s^{u+1} c^{v-1}
    D*_{ab}  s^u c^v = -((u+a+1/2)/2) s^{u-1} c^{v+1} + ((v+b+1/2)/2) s^{u+1} c^{v-1}

Exponents and coefficients are kept as Fractions, so leading singular terms
that cancel do so exactly rather than in floating point near the endpoints.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .jacobi_core import JacobiParams, half_angles

__all__ = ["HalfAngleSeries", "psi_series"]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(float(x))


class HalfAngleSeries:
    """Finite sum of coeff * sin(theta/2)^u * cos(theta/2)^v."""

    def __init__(self, terms=None):
        self.terms: dict = {}
        for (u, v), coef in (terms or {}).items():
            self._add(_frac(u), _frac(v), _frac(coef))

    def _add(self, u, v, coef):
        if coef == 0:
            return
        key = (u, v)
        total = self.terms.get(key, Fraction(0)) + coef
        if total == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    def _apply(self, left, right):
        """Map every monomial to left(u,v) s^{u-1}c^{v+1} + right(u,v) s^{u+1}c^{v-1}."""
        out = HalfAngleSeries()
        for (u, v), coef in self.terms.items():
            out._add(u - 1, v + 1, coef * left(u, v))
            out._add(u + 1, v - 1, coef * right(u, v))
        return out

    def d_theta(self) -> "HalfAngleSeries":
        return self._apply(lambda u, v: u / 2, lambda u, v: -v / 2)

    def D(self, params: JacobiParams) -> "HalfAngleSeries":
        a, b = _frac(params.alpha), _frac(params.beta)
        half = Fraction(1, 2)
        return self._apply(lambda u, v: (u - a - half) / 2, lambda u, v: -(v - b - half) / 2)

    def D_star(self, params: JacobiParams) -> "HalfAngleSeries":
        a, b = _frac(params.alpha), _frac(params.beta)
        half = Fraction(1, 2)
        return self._apply(lambda u, v: -(u + a + half) / 2, lambda u, v: (v + b + half) / 2)

    def __add__(self, other):
        out = HalfAngleSeries(dict(self.terms))
        for (u, v), c in other.terms.items():
            out._add(u, v, c)
        return out

    def scaled(self, factor) -> "HalfAngleSeries":
        return HalfAngleSeries({k: c * _frac(factor) for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, theta, comp=None):
        s, c = half_angles(theta, comp)
        with np.errstate(divide="ignore"):
            ls, lc = np.log(s), np.log(c)
        out = np.zeros(np.shape(s))
        for (u, v), coef in sorted(self.terms.items()):
            out = out + float(coef) * np.exp(float(u) * ls + float(v) * lc)
        return out if out.ndim else float(out)

    def __repr__(self):
        parts = [f"{c}*s^{u}*c^{v}" for (u, v), c in sorted(self.terms.items())]
        return "HalfAngleSeries(" + " + ".join(parts or ["0"]) + ")"


def psi_series(alpha, beta) -> HalfAngleSeries:
    """Psi^{alpha,beta} = s^{alpha+1/2} c^{beta+1/2} as a one-term series."""
    half = Fraction(1, 2)
    return HalfAngleSeries({(_frac(alpha) + half, _frac(beta) + half): 1})
