"""Sobolev and potential norms, truncated-norm blow-up diagnostics, counterexamples."""
from __future__ import annotations

import inspect
import math
from dataclasses import dataclass

import numpy as np

from .halfangle import HalfAngleSeries, psi_series
from .jacobi_core import JacobiParams, exponent_range
from .quadrature import (QuadratureGrid, SampledFunction, SpectralCoefficients,
                         _powabs, build_grid, compensated_sum, grid_for_bandwidth,
                         grid_from_breakpoints, lp_norm, synthesize)
from .report import ExperimentReport
from .spectral_ops import (ConfigurationError, DerivativeKind, derivative_spectral,
                           potential_inverse)

__all__ = [
    "SobolevVariant",
    "CounterexampleFunction",
    "check_exponent",
    "derivative_images",
    "sobolev_norm",
    "potential_norm",
    "BlowupResult",
    "window_grid",
    "blowup_diagnostic",
    "counterexample_bounds_check",
]


@dataclass(frozen=True)
class SobolevVariant:
    variant: str
    m: int
    p: float

    def __post_init__(self):
        DerivativeKind(self.variant, self.m)
        if self.m < 1:
            raise ValueError("Sobolev order m must be >= 1")


class CounterexampleFunction:
    """f = Psi^{-alpha,-beta} with its exact derivatives as half-angle series."""

    def __init__(self, params: JacobiParams):
        if params.alpha == 0 or params.beta == 0:
            raise ConfigurationError("the counterexample needs alpha != 0 and beta != 0")
        self.params = params
        self.f = psi_series(-params.alpha, -params.beta)
        self.Df = self.f.D(params)
        self.interlaced2 = self.Df.D_star(params)
        self.variable2 = self.Df.D(params.shifted(1))

    def __call__(self, theta, comp=None):
        return self.f(theta, comp)


def check_exponent(params: JacobiParams, p: float):
    rng = exponent_range(params)
    if p not in rng:
        raise ConfigurationError(
            f"p = {p} is outside E({params.alpha}, {params.beta}) = ({rng.lower}, {rng.upper})")


def _grid(c: SpectralCoefficients, grid):
    return grid if grid is not None else grid_for_bandwidth(c.N)


def derivative_images(c: SpectralCoefficients, variant: str, m: int):
    """[D^(0) c, ..., D^(m) c] for the chosen derivative family."""
    return [derivative_spectral(DerivativeKind(variant, k), c) for k in range(m + 1)]


def sobolev_norm(c: SpectralCoefficients, v: SobolevVariant, grid: QuadratureGrid | None = None,
                 parts: bool = False):
    """sum_{k<=m} ||D^(k) f||_p with D^(k) of the variant's kind.

    With ``parts`` the individual terms are returned as a list instead.
    """
    check_exponent(c.params, v.p)
    grid = _grid(c, grid)
    terms = [lp_norm(synthesize(img, grid), v.p) for img in derivative_images(c, v.variant, v.m)]
    if parts:
        return terms
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def potential_norm(c: SpectralCoefficients, s: float, p: float,
                   grid: QuadratureGrid | None = None, kind: str | None = None):
    """||g||_p where f = L^{-s/2} g, or the Bessel variant when alpha + beta = -1."""
    check_exponent(c.params, p)
    grid = _grid(c, grid)
    return lp_norm(synthesize(potential_inverse(c, s, kind), grid), p)


# truncated norms -------------------------------------------------------------

@dataclass
class BlowupResult:
    epsilons: np.ndarray
    norms: np.ndarray
    powers: np.ndarray
    norm_slope: float
    power_slope: float
    raw_power_slope: float
    log_rate: float

    steps: np.ndarray

    @property
    def relative_increments(self) -> np.ndarray:
        """(I(eps_{i+1}) - I(eps_i)) / I(eps_i) for the p-th powers."""
        return self.steps / self.powers[:-1]


def window_grid(epsilons, ratio: float = 0.5, nodes_per_panel: int = 16) -> QuadratureGrid:
    """Geometrically graded grid with a breakpoint at every eps (and pi - eps)."""
    eps = np.sort(np.asarray(epsilons, dtype=float))
    pts = set(float(e) for e in eps)
    x = math.pi / 2 * ratio
    while x > eps[0]:
        if all(abs(x - e) > 1e-3 * e for e in eps):
            pts.add(x)
        x *= ratio
    breaks = [0.0] + sorted(pts) + [math.pi / 2]
    return grid_from_breakpoints(breaks, nodes_per_panel, descriptor=("window", len(breaks) - 1,
                                                                      nodes_per_panel))


def _eval_closed_form(f, theta, comp):
    """Call f(theta, comp) when f accepts the complement pi - theta, else f(theta)."""
    if isinstance(f, (HalfAngleSeries, CounterexampleFunction)):
        return f(theta, comp)
    try:
        params = inspect.signature(f).parameters
    except (TypeError, ValueError):
        return f(theta)
    return f(theta, comp) if len(params) >= 2 else f(theta)


def _loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def blowup_diagnostic(f, p: float, epsilons, grid: QuadratureGrid | None = None) -> BlowupResult:
    """Norms of f over (eps, pi - eps) for decreasing eps, with fitted log-log slopes.

    Slopes are least-squares fits in log-log space over the smaller half of
    the epsilons.  ``norm_slope`` is the slope of log ||f||_{p,eps} against log eps.
    ``power_slope`` is the exponent s in I(eps) ~ C0 + c eps^s for the p-th
    powers, fitted to the increments I(eps_{i+1}) - I(eps_i) so that the
    constant C0 from the bulk drops out (eps should be geometric for this).
    ``raw_power_slope`` fits log I directly.  ``log_rate`` is dI/dlog(1/eps)
    from a linear fit, which detects logarithmic growth when s ~ 0.
    """
    eps = np.asarray(epsilons, dtype=float)
    if eps.ndim != 1 or len(eps) < 2:
        raise ValueError("need at least two epsilons")
    if np.any(np.diff(eps) >= 0) or eps[0] >= math.pi / 2 or eps[-1] <= 0:
        raise ValueError("epsilons must decrease inside (0, pi/2)")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    grid = grid if grid is not None else window_grid(eps)
    widest = grid.window_mask(eps[-1])
    values = np.zeros(len(grid))
    values[widest] = _eval_closed_form(f, grid.nodes[widest], grid.comp[widest])
    SampledFunction(grid, values).check_finite()
    # integrate each slab between consecutive windows on its own, so small
    # increments are not lost to cancellation between cumulative totals
    dens = _powabs(values, p) * grid.weights
    masks = [grid.window_mask(e) for e in eps]
    slabs = [compensated_sum(np.where(masks[0], dens, 0.0))]
    slabs += [compensated_sum(np.where(masks[i + 1] & ~masks[i], dens, 0.0))
              for i in range(len(eps) - 1)]
    powers = np.array([math.fsum(slabs[:i + 1]) for i in range(len(eps))])
    steps = np.array(slabs[1:])
    norms = powers ** (1.0 / p)
    tiny = np.finfo(float).tiny
    # fit on the smaller half of the epsilons, where the leading endpoint term dominates
    tail = slice(min(len(eps) // 2, len(eps) - 2), None)
    norm_slope = _loglog_slope(eps[tail], np.maximum(norms[tail], tiny))
    raw_power_slope = _loglog_slope(eps[tail], np.maximum(powers[tail], tiny))
    step_tail = slice(min(len(steps) // 2, len(steps) - 2), None) if len(steps) > 2 else slice(None)
    power_slope = _loglog_slope(eps[1:][step_tail], np.maximum(steps[step_tail], tiny))
    log_rate = float(np.polyfit(-np.log(eps[tail]), powers[tail], 1)[0])
    return BlowupResult(eps, norms, powers, norm_slope, power_slope, raw_power_slope, log_rate,
                        steps)


# counterexample bounds ---------------------------------------------------------

def _ratio_bounds(params: JacobiParams, grid: QuadratureGrid):
    ce = CounterexampleFunction(params)
    a, b = params.alpha, params.beta
    mask = (grid.nodes > 0) & (grid.comp > 0)
    th, cp = grid.nodes[mask], grid.comp[mask]
    lt, lc = np.log(th), np.log(cp)

    def power(x, y):
        return np.exp(x * lt + y * lc)

    f = ce.f(th, cp)
    Df = ce.Df(th, cp)
    inter = ce.interlaced2(th, cp)
    var2 = ce.variable2(th, cp)
    return {
        "f <= C theta^(1/2-a) (pi-theta)^(1/2-b)": float(np.max(f / power(0.5 - a, 0.5 - b))),
        "|D f| <= C theta^(-a-1/2) (pi-theta)^(-b-1/2)": float(np.max(np.abs(Df) / power(-a - 0.5, -b - 0.5))),
        "|D* D f| <= C f": float(np.max(np.abs(inter) / f)),
        "|D_(a+1,b+1) D f| + 1 >= C theta^(-a-3/2) (pi-theta)^(-b-3/2)":
            float(np.min((np.abs(var2) + 1) / power(-a - 1.5, -b - 1.5))),
    }


def counterexample_bounds_check(params: JacobiParams, grid: QuadratureGrid | None = None,
                                refined: QuadratureGrid | None = None,
                                tolerance: float = 0.05) -> ExperimentReport:
    """Fit the four pointwise bounds for Psi^{-a,-b} and test their stability.

    Constants are the sup (upper bounds) or inf (lower bound) of the ratio
    over the nodes; a bound passes when its constant is finite and positive
    and moves by less than ``tolerance`` (relative) on the refined grid.
    """
    CounterexampleFunction(params)
    grid = grid if grid is not None else build_grid()
    if refined is None:
        P, r, q = grid.descriptor if isinstance(grid.descriptor[0], int) else (64, 0.5, 16)
        refined = build_grid(2 * P, r, q)
    coarse = _ratio_bounds(params, grid)
    fine = _ratio_bounds(params, refined)
    mirrored = _ratio_bounds(params.swapped(), grid)
    report = ExperimentReport(
        name="counterexample_bounds",
        params=[params],
        settings={"grid": list(grid.descriptor), "refined_grid": list(refined.descriptor)},
    )
    for key in coarse:
        c0, c1 = coarse[key], fine[key]
        ok = math.isfinite(c0) and c0 > 0
        report.check(f"{key}: fitted C", c0, 0.0, ">", passed=ok)
        report.check(f"{key}: refinement change", abs(c1 - c0) / c0, tolerance)
        report.check(f"{key}: reflection symmetry", abs(mirrored[key] - c0) / c0, 1e-8)
    return report
