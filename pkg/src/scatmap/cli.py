"""Command-line interface emitting machine-readable curve and table data.

Subcommands: regime | crests | portrait | highways | tangency | orbit |
difftime | epsstar | verify.  Exit codes: 0 ok, 1 numeric failure, 2 bad
configuration.  CSV output is comma-separated with 17 significant digits;
JSON mirrors the same records.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import __version__
from .contour import contour_polylines
from .crests import (
    CrestBranch,
    Orientation,
    classify_regime,
    crest_orientation,
    crest_residual,
    eta,
    tangency_points,
    xi,
)
from .diffusion import (
    build_pseudo_orbit_general,
    build_pseudo_orbit_highway,
    diffusion_time,
    shi,
)
from .errors import ScatmapError
from .gridkernels import reduced_poincare_grid
from .highways import Side, trace_highway
from .model import TWO_PI, FullState, ModelParams, melnikov_potential, pendulum_energy
from .scattering import finite_diff_grad, grad_reduced_poincare, reduced_poincare
from .verify import (
    epsilon_star,
    integrate_full,
    measure_homoclinic_jump,
    melnikov_quadrature_oracle,
)

DEFAULTS = {"a00": 0.0, "a10": 0.6, "a01": 1.0, "eps": 0.01}


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (want key=value): {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def build_params(args: argparse.Namespace) -> ModelParams:
    """Merge defaults < config file < explicit flags."""
    merged = dict(DEFAULTS)
    mu = None
    if getattr(args, "config", None):
        cfg = _read_config_file(args.config)
        for key in DEFAULTS:
            if key in cfg:
                merged[key] = float(cfg[key])
        if "mu" in cfg:
            mu = float(cfg["mu"])
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if getattr(args, "mu", None) is not None:
        mu = args.mu
    if mu is not None and getattr(args, "a10", None) is None:
        merged["a10"] = mu * merged["a01"]
    return ModelParams(**merged)


class _Writer:
    def __init__(self, out_path: str | None):
        self.out_path = out_path

    def write(self, text: str, suffix: str = ""):
        if self.out_path is None:
            sys.stdout.write(text)
            if not text.endswith("\n"):
                sys.stdout.write("\n")
            return
        path = self.out_path
        if suffix:
            stem, dot, ext = path.rpartition(".")
            path = f"{stem}.{suffix}.{ext}" if dot else f"{path}.{suffix}"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines)


def _emit(args, writer: _Writer, header: list[str], rows: list[list],
          json_key: str):
    if args.format == "csv":
        writer.write(_csv(header, rows))
    else:
        payload = [dict(zip(header, row)) for row in rows]
        writer.write(json.dumps({json_key: payload}, indent=2))


# ----------------------------------------------------------------- commands

def cmd_regime(args) -> int:
    params = build_params(args)
    rep = classify_regime(params)
    doc = {
        "mu": params.mu,
        "regime": rep.regime.value,
        "mu_low": rep.mu_low,
        "mu_high": rep.mu_high,
        "I_plus": rep.I_plus,
        "I_plusplus": rep.I_plusplus,
        "boundary": rep.boundary,
    }
    _Writer(args.out).write(json.dumps(doc, indent=2))
    return 0


def _check_grid(n: int):
    if n < 2:
        raise ValueError(f"grid resolution must be >= 2, got {n}")


def cmd_crests(args) -> int:
    params = build_params(args)
    _check_grid(args.grid)
    I = args.I
    orientation = crest_orientation(params, I)
    rows = []
    n = args.grid
    for branch, name in ((CrestBranch.MAXIMUM, "max"), (CrestBranch.MINIMUM, "min")):
        if orientation is Orientation.HORIZONTAL:
            for phi in np.linspace(0.0, TWO_PI, n, endpoint=False):
                s = xi(params, branch, I, float(phi))
                rows.append([name, float(phi), s, crest_residual(params, I, float(phi), s)])
        elif orientation is Orientation.VERTICAL:
            for s in np.linspace(0.0, TWO_PI, n, endpoint=False):
                phi = eta(params, branch, I, float(s))
                rows.append([name, phi, float(s), crest_residual(params, I, phi, float(s))])
        else:
            raise ScatmapError(f"crest is singular at I = {I!r}; no parameterization")
    _emit(args, _Writer(args.out), ["branch", "phi", "s", "residual"], rows, "crests")
    return 0


def cmd_portrait(args) -> int:
    params = build_params(args)
    _check_grid(args.grid)
    if args.imax <= args.imin:
        raise ValueError("imax must exceed imin")
    n = args.grid
    I_vals = np.linspace(args.imin, args.imax, n)
    th_vals = np.linspace(0.0, TWO_PI, n, endpoint=False)
    Z = reduced_poincare_grid(params, I_vals, th_vals)

    levels: list[float] = []
    if args.levels:
        levels = [float(tok) for tok in args.levels.split(",")]
    elif args.nlevels:
        finite = Z[np.isfinite(Z)]
        levels = list(np.linspace(finite.min(), finite.max(), args.nlevels + 2)[1:-1])

    writer = _Writer(args.out)
    grid_rows = [[float(I_vals[i]), float(th_vals[j]), float(Z[i, j])]
                 for i in range(n) for j in range(n)]
    contour_rows = []
    for level in levels:
        polys = contour_polylines(th_vals, I_vals, Z, level)
        for pid, poly in enumerate(polys):
            for vid, (theta, I) in enumerate(poly):
                contour_rows.append([float(level), pid, vid, float(I), float(theta)])

    if args.format == "json":
        writer.write(json.dumps({
            "grid": [dict(zip(["I", "theta", "value"], r)) for r in grid_rows],
            "contours": [dict(zip(["level", "polyline", "vertex", "I", "theta"], r))
                         for r in contour_rows],
        }, indent=2))
        return 0
    writer.write(_csv(["I", "theta", "value"], grid_rows))
    if levels:
        text = _csv(["level", "polyline", "vertex", "I", "theta"], contour_rows)
        if args.out is None:
            sys.stdout.write("\n")
            writer.write(text)
        else:
            writer.write(text, suffix="contours")
    return 0


def cmd_highways(args) -> int:
    params = build_params(args)
    sides = {"left": [Side.LEFT], "right": [Side.RIGHT],
             "both": [Side.LEFT, Side.RIGHT]}[args.side]
    rows = []
    for side in sides:
        for smp in trace_highway(params, side, args.imin, args.imax, args.step):
            rows.append([side.value, smp.I, smp.theta, smp.psi, smp.residual])
    _emit(args, _Writer(args.out), ["side", "I", "theta", "psi", "residual"],
          rows, "highways")
    return 0


def cmd_tangency(args) -> int:
    params = build_params(args)
    rows = []
    if args.I is not None:
        scan = [args.I]
    else:
        scan = list(np.linspace(args.imin, args.imax, args.grid))
    for I in scan:
        info = tangency_points(params, float(I))
        if info is not None:
            rows.append([info.I, info.psi1, info.psi2, info.theta1, info.theta2])
    _emit(args, _Writer(args.out), ["I", "psi1", "psi2", "theta1", "theta2"],
          rows, "tangency")
    return 0


def cmd_orbit(args) -> int:
    params = build_params(args)
    if args.ifrom is not None and args.ito is not None:
        orbit = build_pseudo_orbit_highway(params, args.ifrom, args.ito,
                                           c=args.c, a=args.a)
    else:
        orbit = build_pseudo_orbit_general(params, args.Istar, c=args.c, a=args.a)
    rows = []
    for k, leg in enumerate(orbit.legs):
        for pt in leg.points:
            rows.append([k, leg.mechanism.value, pt.I, pt.theta, leg.model_time])
    _emit(args, _Writer(args.out), ["leg", "mechanism", "I", "theta", "model_time"],
          rows, "orbit")
    return 0


def cmd_difftime(args) -> int:
    params = build_params(args)
    if params.eps <= 0.0:
        raise ValueError("difftime requires eps > 0")
    est = diffusion_time(params, args.Istar, c=args.c, a=args.a)
    _Writer(args.out).write(json.dumps(dataclasses.asdict(est), indent=2))
    return 0


def cmd_epsstar(args) -> int:
    params = build_params(args)
    est = epsilon_star(params, args.Istar, grid=args.grid)
    doc = {"I_star": args.Istar, "eps_star": est.value,
           "envelope": est.envelope, "argmin_I": est.argmin_I}
    _Writer(args.out).write(json.dumps(doc, indent=2))
    return 0


def cmd_verify(args) -> int:
    params = build_params(args)
    checks: list[tuple[str, bool, str]] = []

    rng = np.random.default_rng(12345)

    worst = 0.0
    for _ in range(27):
        I = rng.uniform(-3, 3)
        phi, s = rng.uniform(0, TWO_PI, 2)
        closed = melnikov_potential(params, I, phi, s)
        oracle = melnikov_quadrature_oracle(params, I, phi, s, tol=1e-11)
        worst = max(worst, abs(closed - oracle) / max(1.0, abs(closed)))
    checks.append(("melnikov closed form vs quadrature", worst <= 1e-8,
                   f"max rel err {worst:.3e}"))

    worst = 0.0
    tried = 0
    while tried < 100:
        I = rng.uniform(0.1, 3)
        theta = rng.uniform(0, TWO_PI)
        try:
            gi, gt = grad_reduced_poincare(params, I, theta)
            fi, ft = finite_diff_grad(params, I, theta)
        except ScatmapError:
            continue
        tried += 1
        worst = max(worst, abs(gi - fi) / (1 + abs(gi)), abs(gt - ft) / (1 + abs(gt)))
    checks.append(("reduced-function gradient vs finite differences",
                   worst <= 1e-6, f"max scaled err {worst:.3e}"))

    frozen = dataclasses.replace(params, eps=0.0)
    state = FullState(p=2.0 / math.cosh(1.0), q=4.0 * math.atan(math.e), I=0.7,
                      phi=0.3, s=0.0)
    traj = integrate_full(frozen, state, 20.0, tol=1e-11)
    drift = max(abs(pendulum_energy(st.p, st.q)) for st in traj.states)
    i_drift = max(abs(st.I - state.I) for st in traj.states)
    checks.append(("unperturbed invariants under integration",
                   drift <= 1e-9 and i_drift <= 1e-10,
                   f"pendulum energy {drift:.3e}, action drift {i_drift:.3e}"))

    from scipy.special import shichi as _shichi
    ref = float(_shichi(1.0)[0])
    checks.append(("hyperbolic sine integral vs library implementation",
                   abs(shi(1.0) - ref) <= 1e-12, f"err {abs(shi(1.0) - ref):.3e}"))

    if not args.fast and params.eps > 0.0:
        meas, pred = measure_homoclinic_jump(params, 1.0, 1.0, 0.0)
        ok = abs(meas - pred) <= 50.0 * params.eps**2 and (meas == pred == 0.0
                                                           or meas * pred > 0)
        checks.append(("homoclinic action jump vs first-order prediction", ok,
                       f"measured {meas:.6e}, predicted {pred:.6e}"))

    failed = 0
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failed += 0 if ok else 1
    return 1 if failed else 0


# ------------------------------------------------------------------- parser

def _add_common(sp: argparse.ArgumentParser):
    sp.add_argument("--a00", type=float, default=None)
    sp.add_argument("--a10", type=float, default=None)
    sp.add_argument("--a01", type=float, default=None)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--mu", type=float, default=None,
                    help="sets a10 = mu * a01 unless --a10 is given")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--config", default=None, help="key=value config file")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scatmap",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("regime", help="classify the crossing regime of mu")
    _add_common(sp)
    sp.set_defaults(func=cmd_regime)

    sp = sub.add_parser("crests", help="sample both crest branches at fixed I")
    _add_common(sp)
    sp.add_argument("--I", type=float, default=1.2)
    sp.add_argument("--grid", type=int, default=400)
    sp.set_defaults(func=cmd_crests)

    sp = sub.add_parser("portrait", help="reduced-function grid and level curves")
    _add_common(sp)
    sp.add_argument("--imin", type=float, default=-4.0)
    sp.add_argument("--imax", type=float, default=4.0)
    sp.add_argument("--grid", type=int, default=400)
    sp.add_argument("--levels", default=None, help="comma-separated level values")
    sp.add_argument("--nlevels", type=int, default=None)
    sp.set_defaults(func=cmd_portrait)

    sp = sub.add_parser("highways", help="trace the fast-drift level curves")
    _add_common(sp)
    sp.add_argument("--imin", type=float, default=-4.0)
    sp.add_argument("--imax", type=float, default=4.0)
    sp.add_argument("--step", type=float, default=1e-2)
    sp.add_argument("--side", choices=("left", "right", "both"), default="both")
    sp.set_defaults(func=cmd_highways)

    sp = sub.add_parser("tangency", help="tangency angles over an action range")
    _add_common(sp)
    sp.add_argument("--I", type=float, default=None)
    sp.add_argument("--imin", type=float, default=0.0)
    sp.add_argument("--imax", type=float, default=4.0)
    sp.add_argument("--grid", type=int, default=401)
    sp.set_defaults(func=cmd_tangency)

    sp = sub.add_parser("orbit", help="build a drift pseudo-orbit")
    _add_common(sp)
    sp.add_argument("--Istar", type=float, default=4.0)
    sp.add_argument("--ifrom", type=float, default=None)
    sp.add_argument("--ito", type=float, default=None)
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--a", type=float, default=0.25)
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("difftime", help="diffusion-time estimate")
    _add_common(sp)
    sp.add_argument("--Istar", type=float, default=4.0)
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--a", type=float, default=0.25)
    sp.set_defaults(func=cmd_difftime)

    sp = sub.add_parser("epsstar", help="admissible perturbation size along a lane")
    _add_common(sp)
    sp.add_argument("--Istar", type=float, default=4.0)
    sp.add_argument("--grid", type=int, default=801)
    sp.set_defaults(func=cmd_epsstar)

    sp = sub.add_parser("verify", help="run the independent-oracle suite")
    _add_common(sp)
    sp.add_argument("--fast", action="store_true")
    sp.set_defaults(func=cmd_verify)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"scatmap: configuration error: {exc}", file=sys.stderr)
        return 2
    except ScatmapError as exc:
        print(f"scatmap: numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
