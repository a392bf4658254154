"""Command-line interface: ``jacsob {eval,apply,norm,verify,kernel} ...``.

Exit codes: 0 when every check passes (or a plain computation succeeds),
1 when a verification check fails, 2 on configuration or I/O errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

from . import experiments as ex
from .jacobi_core import JacobiParams, eigenvalue, exponent_range, phi, psi
from .quadrature import (SpectralCoefficients, build_grid, grid_for_bandwidth, lp_norm,
                         random_test_function, synthesize)
from .report import format_number, to_csv, to_json, write_report
from .sobolev import SobolevVariant, check_exponent, potential_norm, sobolev_norm
from .spectral_ops import (ConfigurationError, DerivativeKind, derivative_spectral,
                           kernel_eval, kernel_terms_needed, poisson, potential,
                           riesz_transform)

__all__ = ["RunConfig", "build_parser", "dispatch", "main"]

DEFAULT_N = 256
DEFAULT_SEED = 42
VERIFY_SUITES = ("identities", "theorem-a", "theorem-b", "poisson", "pencil", "classical", "maximal")


@dataclass
class RunConfig:
    command: str
    target: str
    args: argparse.Namespace

    @property
    def params(self) -> JacobiParams:
        return JacobiParams(self.args.alpha, self.args.beta)

    @property
    def N(self) -> int:
        return DEFAULT_N if self.args.N is None else self.args.N

    def grid(self):
        a = self.args
        if a.grid_panels is None and a.grid_ratio is None and a.grid_nodes is None:
            return None
        return build_grid(a.grid_panels or 64, a.grid_ratio or 0.5, a.grid_nodes or 16)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    g.add_argument("--alpha", type=float, default=0.0)
    g.add_argument("--beta", type=float, default=0.0)
    g.add_argument("--p", type=float, default=None, help="Lebesgue exponent (default 2)")
    g.add_argument("--m", type=int, default=1, help="Sobolev order")
    g.add_argument("--k", type=int, default=1, help="derivative / Riesz order")
    g.add_argument("--N", type=int, default=None, help=f"bandwidth (default {DEFAULT_N})")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g.add_argument("--grid-panels", type=int, default=None)
    g.add_argument("--grid-ratio", type=float, default=None)
    g.add_argument("--grid-nodes", type=int, default=None)
    g.add_argument("--out", default=None, help="output path (default: stdout)")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    o = common.add_argument_group("operator options")
    o.add_argument("--n", type=int, default=0, help="basis index")
    o.add_argument("--theta", type=float, default=None)
    o.add_argument("--varphi", type=float, default=None)
    o.add_argument("--r", type=float, default=None)
    o.add_argument("--t", type=float, default=None)
    o.add_argument("--l", type=int, default=None)
    o.add_argument("--s", type=float, default=None, help="potential order (default m)")
    o.add_argument("--sigma", type=float, default=1.0)
    o.add_argument("--kind", choices=("riesz", "bessel"), default=None)
    o.add_argument("--mode", choices=("semigroup", "integral", "spectral_integral", "tail"),
                   default="spectral_integral")
    o.add_argument("--which", choices=("R1", "R2", "R1_tilde", "R2_tilde"), default="R1")
    o.add_argument("--variant", choices=("variable_index", "interlacing"), default="variable_index")
    o.add_argument("--coeffs", default=None,
                   help="comma-separated coefficients; default is the seeded random test function")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="jacsob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, targets in (("eval", ("phi", "psi", "eigenvalue", "range")),
                          ("apply", ("derivative", "potential", "poisson", "riesz")),
                          ("norm", ("sobolev", "potential", "lp")),
                          ("verify", VERIFY_SUITES)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("target", choices=targets)
    p = sub.add_parser("kernel", parents=[common])
    p.set_defaults(target="kernel")
    return parser


# preconditions --------------------------------------------------------------

def _require(cond, message):
    if not cond:
        raise ConfigurationError(message)


def validate(cfg: RunConfig) -> None:
    """Check every precondition of the command before any computation."""
    a = cfg.args
    params = cfg.params
    _require(cfg.N >= 1, "N must be >= 1")
    _require(a.m >= 1, "m must be >= 1")
    _require(a.k >= 0, "k must be >= 0")
    if a.p is not None:
        _require(a.p >= 1, "p must be >= 1")
    cfg.grid()
    if cfg.command == "eval" and cfg.target in ("phi", "psi"):
        _require(a.theta is not None, "--theta is required")
        _require(0 < a.theta < math.pi, "theta must lie in (0, pi)")
    if cfg.command == "eval" and cfg.target == "eigenvalue":
        _require(a.n >= 0, "n must be >= 0")
    if cfg.command == "apply" and cfg.target == "poisson":
        if a.mode == "semigroup":
            _require(a.t is not None and a.t > 0, "semigroup mode needs --t > 0")
        else:
            _require(a.r is not None and 0 < a.r < 1, "this mode needs --r in (0, 1)")
        if a.mode == "tail":
            _require(a.l is not None and a.l >= 0, "tail mode needs --l >= 0")
    if cfg.command == "apply" and cfg.target == "potential":
        _require(a.sigma > 0, "sigma must be positive")
        if a.kind == "riesz":
            _require(not params.zero_eigenvalue, "alpha + beta = -1: use --kind bessel")
    if cfg.command == "apply" and cfg.target == "riesz" and a.which == "R2":
        _require(not params.zero_eigenvalue, f"alpha + beta = -1: use --which {a.which}_tilde")
    if cfg.command == "kernel":
        _require(a.r is not None and 0 < a.r < 1, "kernel needs --r in (0, 1)")
        _require(a.theta is not None and a.varphi is not None, "kernel needs --theta and --varphi")
        if a.N is not None:
            need = kernel_terms_needed(params, a.r)
            _require(a.N >= need, f"N = {a.N} too small for r = {a.r}; need N >= {need}")
    if cfg.command == "norm":
        if cfg.target in ("sobolev", "potential"):
            check_exponent(params, _p(a))
        if cfg.target == "potential" and a.kind == "riesz":
            _require(not params.zero_eigenvalue, "alpha + beta = -1: use --kind bessel")
    if cfg.command == "verify":
        t = cfg.target
        if t == "identities":
            _require(cfg.N >= 8, "the identity suite needs N >= 8")
        if t in ("theorem-a", "theorem-b", "poisson", "classical", "maximal"):
            check_exponent(params, _p(a))


def _p(a):
    return 2.0 if a.p is None else a.p


# commands -------------------------------------------------------------------

def _coefficients(cfg: RunConfig, params=None) -> SpectralCoefficients:
    params = params or cfg.params
    if cfg.args.coeffs:
        try:
            values = [float(v) for v in cfg.args.coeffs.split(",")]
        except ValueError as err:
            raise ConfigurationError(f"bad --coeffs: {err}") from None
        return SpectralCoefficients(params, values)
    return random_test_function(params, cfg.N, cfg.args.seed)


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _value_payload(cfg: RunConfig, value):
    return {"command": f"{cfg.command} {cfg.target}",
            "params": {"alpha": cfg.args.alpha, "beta": cfg.args.beta}, "value": value}


def _run_eval(cfg: RunConfig):
    a, params = cfg.args, cfg.params
    if cfg.target == "phi":
        value = float(phi(params, a.n, a.theta))
    elif cfg.target == "psi":
        value = float(psi(params, a.theta))
    elif cfg.target == "eigenvalue":
        value = float(eigenvalue(params, a.n))
    else:
        rng = exponent_range(params)
        value = {"lower": float(rng.lower), "upper": float(rng.upper)}
    if a.out is not None:
        _emit(to_json(_value_payload(cfg, value)), a.out)
    if isinstance(value, dict):
        print(f"{format_number(value['lower'])} {format_number(value['upper'])}")
    else:
        print(format_number(value))
    return 0


def _run_apply(cfg: RunConfig):
    a = cfg.args
    if cfg.target == "riesz" and a.which.startswith("R2"):
        c = _coefficients(cfg, cfg.params.shifted(a.k))
        out = riesz_transform(c, a.k, a.which, base=cfg.params)
    else:
        c = _coefficients(cfg)
        if cfg.target == "derivative":
            out = derivative_spectral(DerivativeKind(a.variant, a.k), c)
        elif cfg.target == "potential":
            out = potential(c, a.sigma, a.kind)
        elif cfg.target == "poisson":
            value = a.t if a.mode == "semigroup" else a.r
            out = poisson(c, a.mode, value, a.l)
        else:
            out = riesz_transform(c, a.k, a.which)
    payload = {"command": f"apply {cfg.target}",
               "source": {"alpha": c.params.alpha, "beta": c.params.beta},
               "target": {"alpha": out.params.alpha, "beta": out.params.beta},
               "coeffs": [float(x) for x in out.coeffs]}
    _emit(to_json(payload), a.out)
    return 0


def _run_norm(cfg: RunConfig):
    a = cfg.args
    c = _coefficients(cfg)
    grid = cfg.grid()
    p = _p(a)
    if cfg.target == "sobolev":
        value = sobolev_norm(c, SobolevVariant(a.variant, a.m, p), grid)
    elif cfg.target == "potential":
        value = potential_norm(c, a.m if a.s is None else a.s, p, grid, a.kind)
    else:
        value = lp_norm(synthesize(c, grid or grid_for_bandwidth(c.N)), p)
    if a.out is not None:
        _emit(to_json(_value_payload(cfg, float(value))), a.out)
    print(format_number(value))
    return 0


def _run_kernel(cfg: RunConfig):
    a, params = cfg.args, cfg.params
    N = a.N if a.N is not None else kernel_terms_needed(params, a.r)
    value = kernel_eval(params, a.r, a.theta, a.varphi, N)
    if a.out is not None:
        _emit(to_json(_value_payload(cfg, float(value))), a.out)
    print(format_number(value))
    return 0


def run_verify(cfg: RunConfig):
    a, params = cfg.args, cfg.params
    t, N, p = cfg.target, cfg.N, _p(a)
    if t == "identities":
        return ex.run_identity_suite(params, N, grid=cfg.grid())
    if t == "theorem-a":
        return ex.run_theorem_a(params, p, a.m, a.seed, N)
    if t == "theorem-b":
        return ex.run_theorem_b(params, p, a.seed, N)
    if t == "poisson":
        return ex.run_poisson_suite(params, p, a.seed, N)
    if t == "pencil":
        return ex.run_pencil_suite(params, N, exponents=None if a.p is None else (a.p,))
    if t == "classical":
        return ex.run_classical_comparison(params, p, a.m)
    return ex.run_maximal_sobolev(params, p, a.seed, N)


def _run_verify(cfg: RunConfig):
    report = run_verify(cfg)
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    if cfg.args.out is None:
        sys.stdout.write(to_json(report) if cfg.args.format == "json" else to_csv(report))
    else:
        write_report(report, cfg.args.format, cfg.args.out)
    print(f"overall: {'PASS' if report.overall else 'FAIL'}", file=sys.stderr)
    return 0 if report.overall else 1


_RUNNERS = {"eval": _run_eval, "apply": _run_apply, "norm": _run_norm,
            "verify": _run_verify, "kernel": _run_kernel}


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    cfg = RunConfig(args.command, args.target, args)
    try:
        validate(cfg)
    except ValueError as err:
        print(f"jacsob: error: {err}", file=sys.stderr)
        return 2
    try:
        return _RUNNERS[cfg.command](cfg)
    except (ConfigurationError, OSError) as err:
        print(f"jacsob: error: {err}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
