"""Command line front end.

Every subcommand writes its table(s) and a ``meta.json`` (parameters, versions,
wall time, status) into the directory of ``--out``.  Parameters may come from
a flat TOML file given with ``--config``; flags on the command line win.

Exit status: 0 on success, 1 when a computation fails (the error record is
printed to stderr and stored in ``meta.json``), 2 when the configuration is
invalid.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SqglabError

try:  # Python >= 3.11
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as _toml


class ConfigError(Exception):
    """Invalid command line or configuration file."""


# --------------------------------------------------------------------------- helpers


def _float_list(text: str) -> list[float]:
    """``"0.1,0.2"`` or ``"lin:a:b:k"`` / ``"log:a:b:k"``."""
    text = str(text)
    if text.startswith(("lin:", "log:")):
        kind, a, b, k = text.split(":")
        a, b, k = float(a), float(b), int(k)
        if k < 1:
            raise ConfigError(f"grid needs at least one point: {text}")
        if kind == "log":
            if a <= 0 or b <= 0:
                raise ConfigError(f"log grid needs positive ends: {text}")
            return np.geomspace(a, b, k).tolist()
        return np.linspace(a, b, k).tolist()
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _versions() -> dict:
    import scipy

    return {"sqglab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _check_alpha(alpha: float, upper_open: float | None = 2.0, upper: float | None = None) -> None:
    if upper is not None:
        _require(0.0 <= alpha <= upper, f"alpha must satisfy 0 <= alpha <= {upper:g}, got {alpha}")
    else:
        _require(0.0 <= alpha < upper_open, f"alpha must satisfy 0 <= alpha < {upper_open:g}, got {alpha}")


def _check_n(n) -> None:
    _require(int(n) == n and n >= 1, f"n must be a positive integer, got {n}")


def _check_sigma(sigma) -> None:
    if sigma is not None:
        _require(0.5 < sigma < 1.0, f"sigma must lie in (1/2, 1), got {sigma}")


def _sigma_star(n: int, alpha: float) -> float:
    from .vortex import most_unstable_sigma

    return most_unstable_sigma(n, alpha)


def _smooth(sigma: float, eps: float | None, fraction: float = 0.9):
    from .regularize import admissible_eps, smooth_vortex
    from .vortex import build_vortex

    v = build_vortex(sigma)
    if eps is None:
        eps = fraction * admissible_eps(v)
    return smooth_vortex(v, eps)


# --------------------------------------------------------------------------- commands
# each returns (outputs: list of paths, results: dict)


def cmd_kernel_eval(args, out: Path):
    from .kernels import i_kernel, j_kernel, k_kernel

    sig = np.array(_float_list(args.sigma))
    _require(sig.size > 0 and np.all(sig > 0), "sigma values must be positive")
    I = i_kernel(args.n, args.alpha, sig)
    J = j_kernel(args.n, args.alpha, sig)
    K = k_kernel(args.n, args.alpha, sig)
    _write_csv(out, ("sigma", "I", "J", "K"), zip(sig, I, J, K))
    return [out], {}


def cmd_kernel_closed_form(args, out: Path):
    from .kernels import biot_savart_constant, closed_form_at_1, eval_J_prime_at_1, j_kernel

    _require(args.alpha < 1.0, "the closed form of I at sigma = 1 needs alpha < 1")
    rows = []
    for n in range(1, args.n + 1):
        cf = closed_form_at_1(n, args.alpha)
        j1 = float(j_kernel(n, args.alpha, 1.0))
        rows.append((n, cf.value, j1, eval_J_prime_at_1(n, args.alpha)))
    _write_csv(out, ("n", "I_at_1", "J_at_1", "J_prime_at_1"), rows)
    return [out], {"C_alpha": biot_savart_constant(args.alpha)}


def cmd_vortex_scan(args, out: Path):
    from .vortex import discriminant, instability_onset, most_unstable_sigma, scan_discriminant

    grid = np.linspace(0.5, 1.0 - 1e-6, args.points + 1)[1:]
    scan = scan_discriminant(args.n, args.alpha, grid)
    _write_csv(out, ("sigma", "delta"), scan)
    res = {"onset": instability_onset(args.n, args.alpha, scan)}
    try:
        s = most_unstable_sigma(args.n, args.alpha, scan)
        res["sigma_star"] = s
        res["delta_star"] = float(discriminant(args.n, args.alpha, np.array([s]))[0])
    except SqglabError:
        res["sigma_star"] = None
    return [out], res


def cmd_vortex_eigenpair(args, out: Path):
    from .vortex import build_matrix, build_vortex, unstable_eigenpair

    sigma = args.sigma if args.sigma is not None else _sigma_star(args.n, args.alpha)
    m = build_matrix(build_vortex(sigma), args.n, args.alpha)
    pair = unstable_eigenpair(m)
    res = {"sigma": sigma, "A": m.A, "discriminant": m.discriminant, "z": pair.z,
           "h": [complex(x) for x in pair.h], "lambda": pair.lam}
    with open(out, "w") as fh:
        json.dump(_jsonable(res), fh, indent=2, sort_keys=True)
    return [out], res


def cmd_regularize(args, out: Path):
    from .regularize import solve_fixed_point
    from .vortex import build_vortex

    sigma = args.sigma if args.sigma is not None else _sigma_star(args.n, args.alpha)
    v = build_vortex(sigma)
    rows = []
    for eps in _float_list(args.eps):
        _require(eps > 0, "eps must be positive")
        r = solve_fixed_point(v, args.n, args.alpha, eps, N=args.N, tol=args.tol,
                              max_iter=args.max_iter)
        rows.append((eps, r.z.real, r.z.imag, r.z_eps.real, r.z_eps.imag, abs(r.z_eps - r.z),
                     r.lam.real, r.lam.imag, r.iterations, r.residual))
    _write_csv(out, ("eps", "z_re", "z_im", "zeps_re", "zeps_im", "abs_dz", "lambda_re",
                     "lambda_im", "iterations", "residual"), rows)
    return [out], {"sigma": sigma}


def cmd_radial_velocity(args, out: Path):
    from .radial_ops import vortex_velocity

    sigma = args.sigma if args.sigma is not None else _sigma_star(args.n, args.alpha)
    tb = _smooth(sigma, args.eps)
    R = np.linspace(args.R_min, args.R_max, args.points)
    vel = vortex_velocity(tb, args.alpha, R)
    _write_csv(out, ("R", "theta_bar", "v_phi"), zip(R, tb.profile(R), vel.values.real))
    return [out], {"sigma": sigma, "eps": tb.eps}


def cmd_eigen_solve(args, out: Path):
    from .eigen import solve_mode

    sigma = args.sigma if args.sigma is not None else _sigma_star(args.n, args.alpha)
    tb = _smooth(sigma, args.eps)
    sol = solve_mode(tb, args.n, args.alpha, b=args.b, a=args.a, nodes=args.nodes, m=args.m)
    W = sol.W
    _write_csv(out, ("R", "W_re", "W_im"), zip(W.nodes, W.values.real, W.values.imag))
    return [out], {"sigma": sigma, "eps": tb.eps, "lambda": sol.lambda_b,
                   "residual": sol.residual, "unstable": sol.unstable,
                   "support_radius": sol.support_radius}


def cmd_eigen_continue(args, out: Path):
    from .eigen import SelfSimilarParams, assemble_Lb, continue_in_b, power_law_fit

    sigma = args.sigma if args.sigma is not None else _sigma_star(args.n, args.alpha)
    tb = _smooth(sigma, args.eps)
    a = args.a if args.a is not None else 0.5 * args.alpha + 0.25
    op = assemble_Lb(tb, SelfSimilarParams(a, 0.0, args.alpha, args.m), args.n,
                     nodes=args.nodes, layer_share=0.5)
    b_star, base, sol = continue_in_b(op)
    slope, predicted = power_law_fit(sol, sigma / 2.0)
    W = sol.W
    _write_csv(out, ("R", "W_re", "W_im"), zip(W.nodes, W.values.real, W.values.imag))
    return [out], {"sigma": sigma, "eps": tb.eps, "a": a, "b_star": b_star,
                   "lambda_0": base.lambda_b, "lambda_b": sol.lambda_b,
                   "power_law_slope": slope, "predicted_exponent": predicted}


def cmd_scaling_table(args, out: Path):
    from .selfsimilar import ScalingLaw, to_selfsimilar

    law = ScalingLaw(args.alpha, args.a, args.b, args.s, args.p)
    t = np.array(_float_list(args.t_grid))
    _require(t.size > 0 and np.all(t > 0), "t grid must be positive")
    tau, _ = to_selfsimilar(t, 0.0, args.a, args.b)
    f_th = law.theta_norm(1.0, t)
    f_f = law.force_norm(1.0, t)
    integral = [law.force_integral(1.0, float(x)) for x in t]
    _write_csv(out, ("t", "tau", "theta_factor", "force_factor", "force_integral"),
               zip(t, tau, f_th, f_f, integral))
    return [out], {"exponent_theta": law.exponent_theta, "exponent_f": law.exponent_f,
                   "force_integrable": law.force_integrable}


def _growth(args, out: Path, svg: str | None):
    from .eigen import solve_mode
    from .simulate import run_linear_growth, write_svg

    sigma = args.sigma if args.sigma is not None else _sigma_star(args.n, args.alpha)
    tb = _smooth(sigma, args.smooth_eps)
    sol = solve_mode(tb, args.n, args.alpha)
    run = run_linear_growth(tb, sol.W, sol.lambda_b, args.eps, (args.tau0, args.tau1), n=args.n,
                            alpha=args.alpha, N=args.N, L=args.L, filtered=args.filter)
    run.series.to_csv(out)
    outputs = [out]
    if svg:
        write_svg(svg, run.series.column("tau"), run.series.column("l2_dev"),
                  title=f"deviation growth, alpha={args.alpha:g}, n={args.n}", ylabel="l2_dev")
        outputs.append(Path(svg))
    return outputs, {"sigma": sigma, "smooth_eps": tb.eps, "lambda": sol.lambda_b,
                     "fit_rate": run.fit_rate, "fit_window": run.fit_window,
                     "frequency": run.frequency, "dt": run.dt, "filter": run.filtered,
                     "relative_rate_error": run.fit_rate / sol.lambda_b.real - 1.0}


def cmd_simulate_growth(args, out: Path):
    return _growth(args, out, args.svg)


def cmd_simulate_golovkin(args, out: Path):
    from .eigen import solve_mode
    from .simulate import run_golovkin_pair

    sigma = args.sigma if args.sigma is not None else _sigma_star(args.n, args.alpha)
    tb = _smooth(sigma, args.smooth_eps)
    sol = solve_mode(tb, args.n, args.alpha)
    a = args.a if args.a is not None else 0.5 * args.alpha + 0.25
    run = run_golovkin_pair(tb, sol.W, sol.lambda_b, args.n, a, 0.0, args.alpha, args.tau0,
                            args.tau1, N=args.N, L=args.L, filtered=args.filter)
    p, m = run.plus, run.minus
    rows = zip(p.column("tau"), p.column("l2_dev"), m.column("l2_dev"), run.relative_error,
               p.column("hamiltonian"), m.column("hamiltonian"),
               p.column("hamiltonian_residual"), m.column("hamiltonian_residual"))
    _write_csv(out, ("tau", "l2_dev_plus", "l2_dev_minus", "pair_mismatch", "hamiltonian_plus",
                     "hamiltonian_minus", "h_residual_plus", "h_residual_minus"), rows)
    return [out], {"sigma": sigma, "smooth_eps": tb.eps, "lambda": sol.lambda_b,
                   "max_pair_mismatch": float(np.max(run.relative_error)),
                   "difference_rate": run.difference_rate,
                   "hamiltonian_residual": run.hamiltonian_residual, "dt": run.dt,
                   "filter": args.filter}


def cmd_pipeline_full(args, out_dir: Path):
    from .eigen import solve_mode
    from .regularize import solve_fixed_point
    from .vortex import build_matrix, build_vortex, most_unstable_sigma, scan_discriminant, unstable_eigenpair

    outputs, summary = [], {}
    scan = scan_discriminant(args.n, args.alpha, np.linspace(0.5, 1.0 - 1e-6, args.points + 1)[1:])
    _write_csv(out_dir / "scan.csv", ("sigma", "delta"), scan)
    outputs.append(out_dir / "scan.csv")
    sigma = most_unstable_sigma(args.n, args.alpha, scan)
    pair = unstable_eigenpair(build_matrix(build_vortex(sigma), args.n, args.alpha))
    summary.update(sigma_star=sigma, z=pair.z, lambda_piecewise=pair.lam)
    fp = solve_fixed_point(build_vortex(sigma), args.n, args.alpha, args.eps)
    summary.update(eps=fp.eps, z_eps=fp.z_eps, lambda_fixed_point=fp.lam,
                   fixed_point_iterations=fp.iterations)
    tb = _smooth(sigma, fp.eps)
    sol = solve_mode(tb, args.n, args.alpha, nodes=args.nodes)
    W = sol.W
    _write_csv(out_dir / "eigen.csv", ("R", "W_re", "W_im"), zip(W.nodes, W.values.real, W.values.imag))
    outputs.append(out_dir / "eigen.csv")
    summary.update(lambda_eigen=sol.lambda_b,
                   eigen_vs_fixed_point=abs(sol.lambda_b - fp.lam) / abs(fp.lam))
    if not args.no_simulate:
        ns = argparse.Namespace(n=args.n, alpha=args.alpha, sigma=sigma, smooth_eps=None,
                                eps=args.amp, tau0=0.0, tau1=args.tau1, N=args.N, L=args.L,
                                filter=args.alpha >= 1.0)
        files, res = _growth(ns, out_dir / "growth.csv", None)
        outputs += files
        summary["simulation"] = res
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
    outputs.append(out_dir / "summary.json")
    return outputs, summary


# --------------------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser, out: str | None) -> None:
    p.add_argument("--config", help="flat TOML file with parameter defaults")
    if out is not None:
        p.add_argument("--out", default=out, help=f"output file (default {out})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqglab", description="Vortex instability toolkit for alpha-SQG.")
    parser.add_argument("--version", action="version", version=f"sqglab {__version__}")
    top = parser.add_subparsers(dest="command", required=True)

    subs: dict[tuple[str, str], argparse.ArgumentParser] = {}
    parser.subcommands = subs

    def sub(group, name, func, out, help_):
        p = group.add_parser(name, help=help_)
        subs[(group.dest_command, name)] = p
        _common(p, out)
        p.set_defaults(func=func)
        return p

    kernel = top.add_parser("kernel", help="kernel values").add_subparsers(dest="action", required=True)
    kernel.dest_command = "kernel"
    p = sub(kernel, "eval", cmd_kernel_eval, "kernel.csv", "I, J, K at a list of sigma")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--sigma", default="lin:0.1:0.9:9")
    p = sub(kernel, "closed-form", cmd_kernel_closed_form, "closed_form.csv", "values at sigma = 1 for n = 1..N")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.5)

    vortex = top.add_parser("vortex", help="piecewise vortex").add_subparsers(dest="action", required=True)
    vortex.dest_command = "vortex"
    p = sub(vortex, "scan", cmd_vortex_scan, "scan.csv", "discriminant scan over sigma")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--points", type=int, default=2000)
    p = sub(vortex, "eigenpair", cmd_vortex_eigenpair, "eigenpair.json", "unstable eigenpair of A")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=None)

    reg = top.add_parser("regularize", help="smooth vortex corrections").add_subparsers(dest="action", required=True)
    reg.dest_command = "regularize"
    p = sub(reg, "fixed-point", cmd_regularize, "fixed_point.csv", "corrected eigenvalue for a list of eps")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--eps", default="0.02,0.01,0.005")
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=200)

    rad = top.add_parser("radial", help="radial operators").add_subparsers(dest="action", required=True)
    rad.dest_command = "radial"
    p = sub(rad, "velocity", cmd_radial_velocity, "velocity.csv", "angular velocity of a smooth vortex")
    p.add_argument("--n", type=int, default=2, help="mode used to pick the default sigma")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--R-min", dest="R_min", type=float, default=0.01)
    p.add_argument("--R-max", dest="R_max", type=float, default=2.0)
    p.add_argument("--points", type=int, default=200)

    eig = top.add_parser("eigen", help="radial eigenproblem").add_subparsers(dest="action", required=True)
    eig.dest_command = "eigen"
    for name, func, out in (("solve", cmd_eigen_solve, "eigen.csv"), ("continue", cmd_eigen_continue, "continuation.csv")):
        p = sub(eig, name, func, out, "leading eigenpair" if name == "solve" else "continuation in b")
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--sigma", type=float, default=None)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--m", type=int, default=5)
        p.add_argument("--nodes", type=int, default=400 if name == "solve" else 800)
        if name == "solve":
            p.add_argument("--b", type=float, default=0.0)

    sc = top.add_parser("scaling", help="self-similar scaling").add_subparsers(dest="action", required=True)
    sc.dest_command = "scaling"
    p = sub(sc, "table", cmd_scaling_table, "scaling.csv", "norm factors over a t grid")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--b", type=float, default=0.02)
    p.add_argument("--t-grid", dest="t_grid", default="log:1e-6:1:50")

    sim = top.add_parser("simulate", help="periodic box runs").add_subparsers(dest="action", required=True)
    sim.dest_command = "simulate"
    for name, func, out in (("growth", cmd_simulate_growth, "growth.csv"), ("golovkin", cmd_simulate_golovkin, "golovkin.csv")):
        p = sub(sim, name, func, out, "linear growth" if name == "growth" else "two-branch Golovkin run")
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--sigma", type=float, default=None)
        p.add_argument("--smooth-eps", dest="smooth_eps", type=float, default=None)
        p.add_argument("--filter", action="store_true")
        if name == "growth":
            p.add_argument("--N", type=int, default=256)
            p.add_argument("--L", type=float, default=8.0)
            p.add_argument("--eps", type=float, default=1e-4, help="perturbation amplitude")
            p.add_argument("--tau0", type=float, default=0.0)
            p.add_argument("--tau1", type=float, default=12.0)
            p.add_argument("--svg", default=None)
        else:
            p.add_argument("--N", type=int, default=512)
            p.add_argument("--L", type=float, default=4.0)
            p.add_argument("--a", type=float, default=None)
            p.add_argument("--tau0", type=float, default=-8.0)
            p.add_argument("--tau1", type=float, default=-3.0)

    pipe = top.add_parser("pipeline", help="chained runs").add_subparsers(dest="action", required=True)
    pipe.dest_command = "pipeline"
    p = pipe.add_parser("full", help="scan, eigenpair, regularize, eigen, simulate")
    subs[("pipeline", "full")] = p
    p.add_argument("--config")
    p.add_argument("--out-dir", dest="out_dir", default=".")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--nodes", type=int, default=400)
    p.add_argument("--amp", type=float, default=1e-4)
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--L", type=float, default=8.0)
    p.add_argument("--tau1", type=float, default=12.0)
    p.add_argument("--no-simulate", dest="no_simulate", action="store_true")
    p.set_defaults(func=cmd_pipeline_full)
    return parser


# --------------------------------------------------------------------------- validation


def validate(args) -> None:
    """Check parameters against the preconditions of the modules they reach."""
    cmd = args.command
    g = vars(args)
    if "n" in g and g["n"] is not None:
        _check_n(g["n"])
    if "alpha" in g:
        if cmd in ("kernel", "vortex"):
            _check_alpha(args.alpha, 2.0)
        else:
            _check_alpha(args.alpha, upper=1.0)
    if "sigma" in g and not isinstance(g["sigma"], str):
        _check_sigma(g["sigma"])
    for key in ("points", "nodes", "max_iter"):
        if g.get(key) is not None:
            _require(g[key] >= 1, f"{key} must be positive")
    if g.get("N") is not None and cmd in ("simulate", "pipeline"):
        N = g["N"]
        _require(N >= 16 and N & (N - 1) == 0, f"N must be a power of two >= 16, got {N}")
    for key in ("L", "tol", "amp", "smooth_eps"):
        if g.get(key) is not None:
            _require(g[key] > 0, f"{key} must be positive")
    if cmd == "simulate":
        _require(args.tau1 > args.tau0, "tau1 must exceed tau0")
        if args.action == "growth":
            _require(args.eps > 0, "perturbation amplitude must be positive")
    if cmd in ("eigen", "radial", "pipeline") and g.get("eps") is not None:
        _require(g["eps"] > 0, "eps must be positive")
    if cmd == "eigen":
        _require(args.m >= 5, f"m must be >= 5, got {args.m}")
        if args.a is not None:
            _require(0.0 < args.a < 1.0 + args.alpha, "a must satisfy 0 < a < 1 + alpha")
        if getattr(args, "b", 0.0) is not None:
            _require(getattr(args, "b", 0.0) >= 0, "b must be non-negative")
    if cmd == "scaling":
        _require(0.0 < args.a <= 1.0, f"a must lie in (0, 1], got {args.a}")
        _require(0.0 < args.b <= 1.0, f"b must lie in (0, 1], got {args.b}")
        _require(args.p >= 1.0, f"p must be >= 1, got {args.p}")


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = _toml.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    flat = {}
    for k, v in data.items():
        if isinstance(v, dict):
            raise ConfigError(f"config must be flat key = value pairs; section [{k}] found")
        flat[k.replace("-", "_")] = v
    return flat


def _parse(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        cfg = load_config(args.config)
        known = set(vars(args)) - {"func", "command", "action", "config"}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise ConfigError(f"unknown config keys for {args.command} {args.action}: {', '.join(unknown)}")
        # file values become defaults of the subcommand, so explicit flags win
        parser = build_parser()
        parser.subcommands[(args.command, args.action)].set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        validate(args)
    except ConfigError as exc:
        print(f"sqglab: configuration error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse errors and --help
        return int(exc.code or 0) if exc.code in (0, None) else 2

    if args.command == "pipeline":
        out_dir = Path(args.out_dir)
        target = out_dir
    else:
        target = Path(args.out)
        out_dir = target.parent if str(target.parent) else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    params = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    meta = {"command": f"{args.command} {args.action}", "parameters": params,
            "versions": _versions(), "threads": os.environ.get("SQGLAB_THREADS")}
    start = time.perf_counter()
    try:
        outputs, results = args.func(args, target)
    except ConfigError as exc:
        print(f"sqglab: configuration error: {exc}", file=sys.stderr)
        return 2
    except (SqglabError, ValueError, ArithmeticError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc),
                  "command": meta["command"]}
        meta.update(status="error", error=record, wall_time_s=time.perf_counter() - start)
        with open(out_dir / "meta.json", "w") as fh:
            json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
        print(json.dumps(record), file=sys.stderr)
        return 1
    meta.update(status="ok", outputs=[str(p) for p in outputs], results=results,
                wall_time_s=time.perf_counter() - start)
    with open(out_dir / "meta.json", "w") as fh:
        json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
