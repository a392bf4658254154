"""Graded composite Gauss-Legendre quadrature on (0, pi) and Fourier-Jacobi transforms.

Each half of the interval is split into uniform panels in the bulk and
geometrically shrinking panels toward the endpoint.  The panel that touches
the endpoint is mapped by theta = eps * u**20, which integrates algebraic
endpoint singularities theta**s, s > -1, to near machine precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .jacobi_core import JacobiParams, phi_table

__all__ = [
    "QuadratureGrid",
    "SampledFunction",
    "SpectralCoefficients",
    "build_grid",
    "grid_from_breakpoints",
    "grid_for_bandwidth",
    "compensated_sum",
    "integrate",
    "lp_norm",
    "inner",
    "basis_table",
    "analyze",
    "synthesize",
    "random_test_function",
]

ENDPOINT_POWER = 20
DEFAULT_GRID = (64, 0.5, 16)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes and weights on (0, pi); ``comp`` holds pi - nodes exactly."""

    nodes: np.ndarray
    weights: np.ndarray
    comp: np.ndarray
    breakpoints: np.ndarray
    panel: np.ndarray
    descriptor: tuple
    interior: tuple = field(default=(0.0, math.pi))

    def __len__(self):
        return len(self.nodes)

    def window_mask(self, eps: float) -> np.ndarray:
        """Nodes of the whole panels lying inside [eps, pi - eps]."""
        lo = self.breakpoints[:-1][self.panel]
        hi = self.breakpoints[1:][self.panel]
        tol = 1e-12 * max(eps, 1e-300)
        return (lo >= eps - tol) & (hi <= math.pi - eps + tol)

    def interior_mask(self) -> np.ndarray:
        lo, hi = self.interior
        return (self.nodes >= lo) & (self.nodes <= hi)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values on a grid; leading axes (if any) index a batch of functions."""

    grid: QuadratureGrid
    values: np.ndarray
    reliable: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape[-1:] != (len(self.grid),):
            raise ValueError("values length must equal the number of grid nodes")
        object.__setattr__(self, "values", values)

    def check_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sampled values must be finite")


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Coefficients (a_0, ..., a_{N-1}) in the basis phi_n^(params); batch axes lead."""

    params: JacobiParams
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim == 0 or coeffs.shape[-1] < 1:
            raise ValueError("need at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def N(self) -> int:
        return self.coeffs.shape[-1]

    def __len__(self):
        return self.N

    @classmethod
    def unit(cls, params, n, N=None):
        N = n + 1 if N is None else N
        c = np.zeros(N)
        if 0 <= n < N:
            c[n] = 1.0
        return cls(params, c)

    def scaled(self, factor):
        return SpectralCoefficients(self.params, factor * self.coeffs)

    def padded(self, N):
        if N <= self.N:
            return self
        pad = np.zeros(self.coeffs.shape[:-1] + (N - self.N,))
        return SpectralCoefficients(self.params, np.concatenate([self.coeffs, pad], axis=-1))


def grid_from_breakpoints(breaks, nodes_per_panel: int, descriptor=None,
                          interior=(0.0, math.pi)) -> QuadratureGrid:
    """Composite rule on the given ascending breakpoints of [0, pi/2], mirrored.

    Panels touching 0 get the power-law endpoint map; the right half is the
    exact mirror image so the rule is symmetric under theta -> pi - theta.
    """
    breaks = np.asarray(breaks, dtype=float)
    if breaks[0] != 0.0 or breaks[-1] != math.pi / 2 or np.any(np.diff(breaks) <= 0):
        raise ValueError("breakpoints must increase from 0 to pi/2")
    x, w = roots_legendre(nodes_per_panel)
    u = (x + 1) / 2
    nodes, weights, panel = [], [], []
    for j, (a, b) in enumerate(zip(breaks[:-1], breaks[1:])):
        if a == 0.0:
            nodes.append(b * u ** ENDPOINT_POWER)
            weights.append(0.5 * w * b * ENDPOINT_POWER * u ** (ENDPOINT_POWER - 1))
        else:
            nodes.append((a + b) / 2 + (b - a) / 2 * x)
            weights.append((b - a) / 2 * w)
        panel.append(np.full(nodes_per_panel, j))
    left = np.concatenate(nodes)
    wl = np.concatenate(weights)
    pl = np.concatenate(panel)
    npan = len(breaks) - 1
    left_comp = math.pi - left
    full_breaks = np.concatenate([breaks, (math.pi - breaks[::-1])[1:]])
    return QuadratureGrid(
        nodes=np.concatenate([left, left_comp[::-1]]),
        weights=np.concatenate([wl, wl[::-1]]),
        comp=np.concatenate([left_comp, left[::-1]]),
        breakpoints=full_breaks,
        panel=np.concatenate([pl, 2 * npan - 1 - pl[::-1]]),
        descriptor=descriptor if descriptor is not None else ("breakpoints", npan, nodes_per_panel),
        interior=interior,
    )


@lru_cache(maxsize=32)
def build_grid(panels_per_side: int = DEFAULT_GRID[0], ratio: float = DEFAULT_GRID[1],
               nodes_per_panel: int = DEFAULT_GRID[2]) -> QuadratureGrid:
    """Graded composite Gauss-Legendre grid.

    The geometric part uses as many levels as needed to reach 1e-12 relative
    width (capped at panels_per_side - 1); the remaining panels are uniform.
    """
    if int(panels_per_side) != panels_per_side or panels_per_side < 1:
        raise ValueError("panels_per_side must be a positive integer")
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    if int(nodes_per_panel) != nodes_per_panel or nodes_per_panel < 2:
        raise ValueError("nodes_per_panel must be an integer >= 2")
    P = int(panels_per_side)
    G = max(1, min(P - 1, math.ceil(math.log(1e-12) / math.log(ratio)))) if P > 1 else 1
    U = P - G
    h = (math.pi / 2) / (U + 1)
    geo = [h * ratio ** j for j in range(G - 1, 0, -1)]
    breaks = [0.0] + geo + [h * (i + 1) for i in range(U)] + [math.pi / 2]
    return grid_from_breakpoints(breaks, int(nodes_per_panel),
                                 descriptor=(P, float(ratio), int(nodes_per_panel)),
                                 interior=(h, math.pi - h))


def grid_for_bandwidth(N: int, nodes_per_panel: int = 16) -> QuadratureGrid:
    """Smallest default-style grid whose uniform panels resolve degree ~2N products."""
    P = DEFAULT_GRID[0]
    while True:
        grid = build_grid(P, DEFAULT_GRID[1], nodes_per_panel)
        h = grid.interior[0]
        if (2 * N + 16) * h <= 9.0:
            return grid
        P += 16


def compensated_sum(x, axis: int = -1):
    """Exactly rounded sum along ``axis`` (math.fsum per row).

    The result is the correctly rounded value of the exact sum, so it does
    not depend on the order of the terms or on how the work is split.
    """
    x = np.moveaxis(np.asarray(x, dtype=float), axis, -1)
    rows = x.reshape(-1, x.shape[-1])
    out = np.array([math.fsum(row) for row in rows.tolist()]).reshape(x.shape[:-1])
    return out if out.ndim else float(out)


def integrate(f: SampledFunction):
    """Quadrature sum of f over (0, pi)."""
    f.check_finite()
    return compensated_sum(f.values * f.grid.weights)


def _powabs(values, p):
    a = np.abs(values)
    if p == 1:
        return a
    if p == 2:
        return a * a
    with np.errstate(divide="ignore"):
        return np.where(a > 0, np.exp(p * np.log(np.where(a > 0, a, 1.0))), 0.0)


def lp_norm(f: SampledFunction, p: float, window=None):
    """(int |f|^p)^(1/p) over (0, pi) or over the node-aligned window (eps, pi-eps)."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    f.check_finite()
    w = f.grid.weights
    if window is not None:
        eps = window[0] if np.ndim(window) else float(window)
        if not 0 < eps < math.pi / 2:
            raise ValueError("window must satisfy 0 < eps < pi/2")
        w = np.where(f.grid.window_mask(eps), w, 0.0)
    if math.isinf(p):
        vals = np.where(w > 0, np.abs(f.values), 0.0)
        out = np.max(vals, axis=-1)
        return out if np.ndim(out) else float(out)
    total = compensated_sum(_powabs(f.values, p) * w)
    out = np.asarray(total) ** (1.0 / p)
    return out if out.ndim else float(out)


def inner(f: SampledFunction, g: SampledFunction):
    return integrate(SampledFunction(f.grid, f.values * g.values))


_TABLES: dict = {}


def basis_table(params: JacobiParams, N: int, grid: QuadratureGrid) -> np.ndarray:
    """Cached (N, M) table of phi_n^(params) on the grid nodes."""
    key = (params.alpha, params.beta, id(grid))
    hit = _TABLES.get(key)
    if hit is not None and hit[0] is grid and hit[1].shape[0] >= N:
        return hit[1][:N]
    table = phi_table(params, N, grid.nodes, grid.comp)
    if len(_TABLES) > 64:
        _TABLES.clear()
    _TABLES[key] = (grid, table)
    return table


def analyze(f: SampledFunction, params: JacobiParams, N: int) -> SpectralCoefficients:
    """Fourier-Jacobi coefficients a_n = int f phi_n, n < N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    f.check_finite()
    table = basis_table(params, N, f.grid)
    wf = f.values * f.grid.weights
    # accumulate node by node so the reduction order is fixed
    s = np.zeros(wf.shape[:-1] + (N,))
    c = np.zeros_like(s)
    for i in range(wf.shape[-1]):
        term = wf[..., i, None] * table[:, i]
        t = s + term
        c += np.where(np.abs(s) >= np.abs(term), (s - t) + term, (term - t) + s)
        s = t
    return SpectralCoefficients(params, s + c)


def synthesize(c: SpectralCoefficients, grid: QuadratureGrid) -> SampledFunction:
    """Pointwise sum_n a_n phi_n on the grid, summed in increasing n."""
    table = basis_table(c.params, c.N, grid)
    # plain C loop (no BLAS): the reduction over n runs in increasing order
    out = np.einsum("...n,nm->...m", c.coeffs, table, optimize=False)
    return SampledFunction(grid, out)


def random_test_function(params: JacobiParams, N: int, seed: int) -> SpectralCoefficients:
    """Coefficients u_n / (n+1)^2 with u_n ~ U[-1, 1] from a seeded generator.

    Draws are sequential, so the first N coefficients do not depend on how
    many more are requested.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    u = np.random.default_rng(seed).uniform(-1.0, 1.0, N)
    return SpectralCoefficients(params, u / (np.arange(N) + 1.0) ** 2)
