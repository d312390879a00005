"""chronoscale command line.

Subcommands: scale, exp, solve, green, bounded, decay, lyap, list.  All file
outputs go under --out; CSV has a header row, t first, 17 significant digits;
every diagnostic is machine-readable JSON on stdout.  Exit codes: 0 ok,
2 schema violation, 3 solver refusal, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import registry
from .diagnostics import nonsyndetic_remark_report
from .dichotomy import GreenOperator, ProjectionFamily, green_apply, \
    green_norm_estimate, spectral_projections
from .errors import ChronoscaleError, SchemaError
from .hilger import ScalarCoefficient, exp_curve
from .linsys import MatrixFunction, Trajectory, step_ivp
from .lyapunov import alpha_coefficient, regularity_defect, ts_exponent
from .solver import (AffineBoundedNonlinearity, DecayNonlinearity,
                     NonlinearityModel, fixed_point_solve,
                     hyperbolic_bounded_solve, regular_decay_solve)
from .timescale import build_grid, delta_derivative_curve, parse_scale

__all__ = ["main", "Scenario", "run"]


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CHRONOSCALE_THREADS", "1")))
    except ValueError:
        return 1


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise SchemaError(f"bad window '{text}' (expected a,b)") from exc
    return a, b


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


@dataclass
class Scenario:
    """One CLI invocation: scale + system descriptors, solver parameters, outputs."""

    command: str
    args: argparse.Namespace


def run(scenario: Scenario) -> int:
    handler = _HANDLERS[scenario.command]
    return handler(scenario.args)


# -- subcommand handlers ----------------------------------------------------


def _cmd_scale(args) -> int:
    scale = parse_scale(args.scale)
    window = _parse_window(args.window) if args.window else None
    info = {
        "descriptor": scale.descriptor(),
        "mu_star": scale.mu_star(window),
        "syndetic": scale.is_syndetic(),
        "nu_star": scale.nu_star(),
    }
    if window:
        info["segments_in_window"] = [list(s) for s in scale.segments_in(*window)]
    out = Path(args.out) / "scale.json"
    _write_json(out, info)
    _emit({"status": "ok", "outputs": [str(out)], **{k: info[k] for k in
                                                     ("mu_star", "syndetic", "nu_star")}})
    return 0


def _cmd_exp(args) -> int:
    scale = parse_scale(args.scale)
    s, t = float(getattr(args, "from")), float(args.to)
    grid = build_grid(scale, (min(s, t), max(s, t)), args.h)
    p = registry.parse_coefficient(args.p)
    curve = exp_curve(ScalarCoefficient.sample(p, grid), s, grid)
    out = Path(args.out) / "exp.csv"
    _write_csv(out, ["t", "e_p"], zip(grid.points, curve))
    _emit({"status": "ok", "outputs": [str(out)],
           "value_at_to": float(curve[grid.index_of(t)])})
    return 0


def _cmd_solve(args) -> int:
    scale = parse_scale(args.scale)
    a, b = _parse_window(args.window)
    grid = build_grid(scale, (a, b), args.h)
    system = registry.parse_system(args.system, scale)
    try:
        x0 = np.array(json.loads(args.x0), dtype=float)
    except (json.JSONDecodeError, ValueError) as exc:
        raise SchemaError(f"bad x0 '{args.x0}'") from exc
    f = registry.parse_forcing(args.f, system.n) if args.f else None
    traj = step_ivp(system, f, grid.points[0], x0, grid)
    out = Path(args.out) / "solve.csv"
    header = ["t"] + [f"x_{k + 1}" for k in range(system.n)]
    _write_csv(out, header, np.column_stack([grid.points, traj.samples]))
    _emit({"status": "ok", "outputs": [str(out)], "sup_norm": traj.sup_norm()})
    return 0


def _cmd_green(args) -> int:
    scale = parse_scale(args.scale)
    a, b = _parse_window(args.window)
    grid = build_grid(scale, (a, b), args.h)
    system = registry.parse_system(args.system, scale)
    if args.proj == "spectral":
        proj = spectral_projections(system, scale, grid)
    else:
        try:
            proj = ProjectionFamily.constant(np.array(json.loads(args.proj)["P"], dtype=float))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise SchemaError(f"bad projection '{args.proj}'") from exc
    f = registry.parse_forcing(args.f, system.n)
    G = GreenOperator(system, proj, grid, tail_tol=args.tail_tol)
    traj, rep = green_apply(G, f, return_report=True)
    norm = green_norm_estimate(G, gamma=args.gamma, lam=args.lam)
    fv = f.sample(G.grid)
    ders, idx = delta_derivative_curve(traj.samples, G.grid, order=4)
    res_curve = np.full(G.grid.m, math.nan)
    for k, i in enumerate(idx):
        t = G.grid.points[i]
        res_curve[i] = float(np.linalg.norm(
            ders[k] - system(t) @ traj.samples[i] - fv[i]))
    out_csv = Path(args.out) / "green.csv"
    header = ["t"] + [f"Lf_{k + 1}" for k in range(system.n)] + ["residual"]
    _write_csv(out_csv, header, np.column_stack([G.grid.points, traj.samples, res_curve]))
    report = {"norm_estimate": norm, "tail_bound": rep.tail_bound,
              "truncated": rep.truncated,
              "max_residual": float(np.nanmax(res_curve))}
    if not scale.is_syndetic():
        report["nonsyndetic_diagnostic"] = nonsyndetic_remark_report(
            gamma=args.gamma or 0.5, lam=args.lam or None)
    out_json = Path(args.out) / "green_report.json"
    _write_json(out_json, report)
    _emit({"status": "ok", "outputs": [str(out_csv), str(out_json)],
           "norm_estimate": norm, "tail_bound": rep.tail_bound})
    return 0


def _cmd_bounded(args) -> int:
    scale = parse_scale(args.scale)
    a, b = _parse_window(args.window)
    grid = build_grid(scale, (a, b), args.h)
    system = registry.parse_system(args.system, scale)
    model = registry.parse_nonlinearity(args.nonlin)
    if isinstance(model, AffineBoundedNonlinearity):
        traj, report = hyperbolic_bounded_solve(system, model, grid,
                                                tol=args.tol, max_iter=args.max_iter)
    elif isinstance(model, NonlinearityModel):
        proj = spectral_projections(system, scale, grid)
        greens = [GreenOperator(system, proj, grid, tail_tol=args.tail_tol)
                  for _ in model.components]
        traj, report = fixed_point_solve(greens, model, tol=args.tol,
                                         max_iter=args.max_iter)
    else:
        raise SchemaError("bounded expects a Lipschitz nonlinearity model")
    out_csv = Path(args.out) / "bounded.csv"
    header = ["t"] + [f"x_{k + 1}" for k in range(system.n)]
    _write_csv(out_csv, header, np.column_stack([traj.grid.points, traj.samples]))
    out_json = Path(args.out) / "bounded_report.json"
    _write_json(out_json, report.as_dict())
    _emit({"status": "ok" if report.converged else "not-converged",
           "outputs": [str(out_csv), str(out_json)], **report.as_dict()})
    return 0 if report.converged else 4


def _cmd_decay(args) -> int:
    scale = parse_scale(args.scale)
    a, b = _parse_window(args.window)
    grid = build_grid(scale, (a, b), args.h)
    try:
        params = json.loads(args.nonlin)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"bad decay parameters: {exc}") from exc
    if "B" not in params:
        raise SchemaError("decay parameters need the diagonal rates 'B'")
    rates = np.array(params.pop("B"), dtype=float)
    model = registry.parse_nonlinearity(params)
    if not isinstance(model, DecayNonlinearity):
        raise SchemaError("decay expects the envelope nonlinearity model")
    traj, report = regular_decay_solve(rates, model, grid, tol=args.tol,
                                       max_iter=args.max_iter)
    out_csv = Path(args.out) / "decay.csv"
    header = ["t"] + [f"x_{k + 1}" for k in range(traj.n)]
    _write_csv(out_csv, header, np.column_stack([traj.grid.points, traj.samples]))
    out_json = Path(args.out) / "decay_report.json"
    _write_json(out_json, report.as_dict())
    _emit({"status": "ok" if report.converged else "not-converged",
           "outputs": [str(out_csv), str(out_json)], **report.as_dict()})
    return 0 if report.converged else 4


def _cmd_lyap(args) -> int:
    scale = parse_scale(args.scale)
    a, b = _parse_window(args.window)
    grid = build_grid(scale, (a, b), args.h)
    system = registry.parse_system(args.system, scale)
    n = system.n

    def column(k: int) -> Trajectory:
        e = np.zeros(n)
        e[k] = 1.0
        return step_ivp(system, None, grid.points[0], e, grid)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        columns = list(pool.map(column, range(n)))
    report = regularity_defect(system, columns, grid, resolution=args.resolution)
    alpha_est = ts_exponent(_alpha_log(system, grid), resolution=args.resolution)
    out = Path(args.out) / "lyap.json"
    payload = {
        "exponents": [e.value for e in report.column_estimates],
        "bands": [e.band for e in report.column_estimates],
        "S": float(sum(e.value for e in report.column_estimates)),
        "alpha_exponent": alpha_est.value,
        "defect": report.defect,
        "defect_band": report.band,
    }
    _write_json(out, payload)
    _emit({"status": "ok", "outputs": [str(out)], **payload})
    return 0


def _alpha_log(system, grid):
    from .lyapunov import LogSamples
    coef = alpha_coefficient(system, grid)
    _, logs = exp_curve(coef, grid.points[0], grid, log=True)
    return LogSamples(grid, logs)


def _cmd_list(args) -> int:
    cat = registry.catalog()
    out = Path(args.out) / "builtins.json"
    _write_json(out, cat)
    _emit({"status": "ok", "outputs": [str(out)], "builtins": cat})
    return 0


_HANDLERS = {
    "scale": _cmd_scale,
    "exp": _cmd_exp,
    "solve": _cmd_solve,
    "green": _cmd_green,
    "bounded": _cmd_bounded,
    "decay": _cmd_decay,
    "lyap": _cmd_lyap,
    "list": _cmd_list,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chronoscale",
                                description="numerics for dynamic equations on time scales")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scale=True, window=True):
        if scale:
            sp.add_argument("--scale", required=True, help="named scale or JSON descriptor")
        if window:
            sp.add_argument("--window", required=True, help="a,b")
        sp.add_argument("--h", type=float, default=0.01, help="dense sampling step")
        sp.add_argument("--out", default=".", help="output directory")

    sp = sub.add_parser("scale", help="inspect a time scale")
    sp.add_argument("--scale", required=True)
    sp.add_argument("--window", default=None)
    sp.add_argument("--out", default=".")

    sp = sub.add_parser("exp", help="Hilger exponential curve")
    sp.add_argument("--scale", required=True)
    sp.add_argument("--p", required=True, help="constant or named coefficient")
    sp.add_argument("--from", required=True)
    sp.add_argument("--to", required=True)
    sp.add_argument("--h", type=float, default=0.01)
    sp.add_argument("--out", default=".")

    sp = sub.add_parser("solve", help="forward IVP solve")
    common(sp)
    sp.add_argument("--system", required=True, help='{"A": [[...]]} or {"rates": [...]}')
    sp.add_argument("--x0", required=True, help="JSON vector")
    sp.add_argument("--f", default=None, help="named forcing")

    sp = sub.add_parser("green", help="apply the Green operator")
    common(sp)
    sp.add_argument("--system", required=True)
    sp.add_argument("--proj", default="spectral", help='"spectral" or {"P": [[...]]}')
    sp.add_argument("--f", required=True)
    sp.add_argument("--gamma", type=float, default=0.0)
    sp.add_argument("--lam", type=float, default=0.0)
    sp.add_argument("--tail-tol", type=float, default=1e-8, dest="tail_tol")

    sp = sub.add_parser("bounded", help="bounded solution by contraction")
    common(sp)
    sp.add_argument("--system", required=True)
    sp.add_argument("--nonlin", required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=200, dest="max_iter")
    sp.add_argument("--tail-tol", type=float, default=1e-8, dest="tail_tol")

    sp = sub.add_parser("decay", help="exponentially decaying solution")
    common(sp)
    sp.add_argument("--nonlin", required=True,
                    help='JSON {"B": [...], "gamma": ..., "alpha": ..., "beta": ..., '
                         '"c1": ..., "c2": ..., "h": ...}')
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=200, dest="max_iter")

    sp = sub.add_parser("lyap", help="Lyapunov exponents and regularity defect")
    common(sp)
    sp.add_argument("--system", required=True)
    sp.add_argument("--resolution", type=float, default=1e-3)

    sp = sub.add_parser("list", help="catalog of builtins")
    sp.add_argument("--out", default=".")

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return run(Scenario(command=args.command, args=args))
    except ChronoscaleError as exc:
        _emit({"status": "error", "error": type(exc).__name__, "message": str(exc),
               "exit_code": exc.exit_code})
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
