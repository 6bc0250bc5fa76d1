"""Command-line driver: ``python3 -m wedgeflow <subcommand> [options]``.

Each subcommand reads its parameters from an optional JSON config file
(``--config``) overridden by command-line flags, validates them, runs the
library, writes the requested files under ``--out`` and prints a one-line
JSON summary.  Exit codes: 0 success, 2 invalid input, 3 numerical failure
(the summary then carries ``{"error": <name>}``).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import emit
from .errors import NonConvergence, NotSupersonic, ValidationError, WedgeFlowError
from .thermo import GasModel, mach_number, potential_p, state_from_mach

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


@dataclass(frozen=True)
class Key:
    name: str
    kind: str          # float | int | str | json
    default: object
    unit: str
    help: str
    choices: tuple = ()

    @property
    def flag(self):
        return "--" + self.name.replace("_", "-")


_GAS = [
    Key("gamma", "float", 1.4, "dimensionless", "adiabatic exponent"),
    Key("gas", "json", None, "object", 'full gas model {"gamma": ., "R": ., "kappa": .}; overrides gamma'),
]
_STREAM = [
    Key("mach", "float", 2.0, "dimensionless", "upstream Mach number"),
    Key("model", "str", "euler", "-", "flow model", ("euler", "potential")),
    Key("p0", "float", 1.0, "pressure", "upstream pressure (Euler model)"),
    Key("rho0", "float", 1.0, "density", "upstream density"),
]

KEYS = {
    "polar": _GAS + _STREAM + [
        Key("n", "int", 201, "count", "number of polar samples"),
    ],
    "wedge": _GAS + _STREAM + [
        Key("theta_deg", "float", 10.0, "deg", "wedge half-angle"),
    ],
    "angles": _GAS + _STREAM,
    "glimm": _GAS + [
        Key("mach", "float", 2.0, "dimensionless", "Mach number of the background incoming flow"),
        Key("p0", "float", 1.0, "pressure", "background pressure"),
        Key("rho0", "float", 1.0, "density", "background density"),
        Key("theta_w_deg", "float", 10.0, "deg", "nominal wedge angle"),
        Key("wedge_table", "json", [], "list of [x1 (length), b' (dimensionless)]",
            "slope perturbation b' switching value at each x1 (b'(0+) = 0)"),
        Key("cauchy", "json", {"kind": "constant"}, "object",
            "incoming perturbation: kind (constant|step|bump|sawtooth), amplitude (units of the "
            "component), component (u1|u2|p|rho), center (length), width (length), teeth (count)"),
        Key("dx1", "float", None, "length", "marching step; default from cfl"),
        Key("dx2", "float", None, "length", "cell size; default spans the shock layer at x1_max with ncells"),
        Key("ncells", "int", 400, "count", "cells across the downstream layer when dx2 is absent"),
        Key("cfl", "float", 0.8, "dimensionless", "sup|lambda| dx1/dx2"),
        Key("x1_max", "float", 50.0, "length", "marching distance"),
        Key("seed", "int", 0, "count", "van der Corput offset (env WEDGEFLOW_SEED overrides)"),
        Key("tail_fraction", "float", 0.25, "dimensionless", "trailing fraction for asymptotics"),
    ],
    "selfsim": _GAS + [
        Key("u10", "float", 2.0, "velocity", "incoming speed (c0 = rho0**((gamma-1)/2))"),
        Key("rho0", "float", 1.0, "density", "incoming density"),
        Key("theta_w_deg", "float", 10.0, "deg", "wedge half-angle"),
        Key("nsamples", "int", 16, "count", "sample points per check"),
        Key("geometry_points", "int", 64, "count", "points per curve in geometry.csv"),
    ],
    "unsteady": _GAS + [
        Key("u10", "float", 2.0, "velocity", "incoming speed"),
        Key("rho0", "float", 1.0, "density", "incoming density"),
        Key("theta_w_deg", "float", 10.0, "deg", "wedge half-angle"),
        Key("nx", "int", 200, "count", "cells along the wall"),
        Key("ny", "int", 100, "count", "cells normal to the wall"),
        Key("lx", "float", 2.0, "length", "domain length along the wall"),
        Key("ly", "float", 1.0, "length", "domain height"),
        Key("cfl", "float", 0.45, "dimensionless", "time step factor, in (0, 0.5]"),
        Key("t_max", "float", 8.0, "time", "final time if not converged"),
        Key("check_every", "int", 50, "count", "steps between residual checks"),
        Key("snapshot_every", "int", 0, "count", "steps between field snapshots (0 = none)"),
        Key("tol", "float", 1e-8, "density/time", "steady-state residual threshold"),
        Key("init", "str", "uniform", "-", "initial field: uniform stream or the strong-shock field",
            ("uniform", "strong")),
    ],
}

OUTPUTS = {
    "polar": "polar.csv (beta_rad, u1, u2, p, rho, mach_downstream, deflection_rad), summary.json",
    "wedge": "summary.json",
    "angles": "summary.json",
    "glimm": "front.csv (x1, sigma, sigma_slope), diagnostics.csv (x1, tv, p_mean, angle_mean, "
             "tv_below, wall_defect_rad), summary.json",
    "selfsim": "skeleton.json, geometry.csv (curve, xi1, xi2), summary.json",
    "unsteady": "shockfit.json, convergence.csv (t, residual, l1_defect, selfsim_defect), "
                "field.csv (x, y, rho, phi), snapshot_<step>.csv, summary.json",
}


# -- parsing and validation --------------------------------------------------------

def _convert(key: Key, raw):
    try:
        if raw is None:
            return None
        if key.kind == "float":
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError("not finite")
            return v
        if key.kind == "int":
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError("not an integer")
            return int(raw)
        if key.kind == "json":
            return json.loads(raw) if isinstance(raw, str) else raw
        v = str(raw)
        if key.choices and v not in key.choices:
            raise ValueError(f"must be one of {key.choices}")
        return v
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{key.name}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wedgeflow", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name, keys in KEYS.items():
        lines = [f"config keys (flag --key-name overrides the config file):"]
        for k in keys:
            lines.append(f"  {k.name:<15} [{k.unit}] default={json.dumps(k.default)}  {k.help}")
        lines.append(f"outputs under --out: {OUTPUTS[name]}")
        lines.append("angles in files carry _rad or _deg suffixes")
        p = sub.add_parser(name, formatter_class=argparse.RawDescriptionHelpFormatter,
                           epilog="\n".join(lines), help=f"{name} subcommand")
        p.add_argument("--config", help="JSON config file (keys below, optional schema_version)")
        p.add_argument("--out", help="output directory")
        for k in keys:
            # choices are checked in _convert so a bad value still yields the JSON summary
            opts = f" (one of {', '.join(k.choices)})" if k.choices else ""
            p.add_argument(k.flag, dest=k.name, default=None, help=f"{k.help}{opts} [{k.unit}]")
    return ap


def resolve_config(sub: str, ns: argparse.Namespace) -> dict:
    """Merge defaults, the config file and explicit flags; reject unknown keys."""
    keys = {k.name: k for k in KEYS[sub]}
    cfg = {name: k.default for name, k in keys.items()}
    if ns.config:
        try:
            doc = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config: {exc}") from None
        if not isinstance(doc, dict):
            raise ValidationError("config must be a JSON object")
        ver = doc.pop("schema_version", SCHEMA_VERSION)
        if str(ver) != SCHEMA_VERSION:
            raise ValidationError(f"unsupported schema_version {ver!r}")
        if doc.pop("subcommand", sub) != sub:
            raise ValidationError("config subcommand does not match")
        unknown = sorted(set(doc) - set(keys))
        if unknown:
            raise ValidationError(f"unknown config keys: {unknown}")
        for name, v in doc.items():
            cfg[name] = _convert(keys[name], v)
    for name, k in keys.items():
        raw = getattr(ns, name)
        if raw is not None:
            cfg[name] = _convert(k, raw)
    return cfg


def _gas(cfg) -> GasModel:
    gas = cfg.get("gas")
    if gas is None:
        return GasModel.from_gamma(cfg["gamma"])
    if not isinstance(gas, dict) or set(gas) - {"gamma", "R", "kappa"}:
        raise ValidationError("gas must be an object with keys among gamma, R, kappa")
    return GasModel.from_gamma(float(gas.get("gamma", 1.4)), float(gas.get("R", 1.0)),
                               float(gas.get("kappa", 1.0)))


def _positive(cfg, *names):
    for n in names:
        if cfg[n] is not None and not cfg[n] > 0:
            raise ValidationError(f"{n} must be positive")


def _angle(cfg, name, hi=90.0):
    v = cfg[name]
    if not 0.0 <= v < hi:
        raise ValidationError(f"{name} must lie in [0, {hi}) degrees")
    return math.radians(v)


def validate(sub: str, cfg: dict) -> dict:
    """Check physical preconditions; returns derived values (gas, radians)."""
    g = _gas(cfg)
    out = {"gas": g}
    if "mach" in cfg:
        if not cfg["mach"] > 1.0:
            raise NotSupersonic(f"mach={cfg['mach']} must exceed 1")
    _positive(cfg, *(n for n in ("p0", "rho0", "u10", "x1_max", "dx1", "dx2", "t_max", "lx", "ly")
                     if n in cfg))
    if sub == "polar" and cfg["n"] < 2:
        raise ValidationError("n must be at least 2")
    if sub == "wedge":
        out["theta_w"] = _angle(cfg, "theta_deg")
    if sub in ("glimm", "selfsim", "unsteady"):
        out["theta_w"] = _angle(cfg, "theta_w_deg")
    if sub == "glimm":
        if not 0.0 < cfg["cfl"] < 1.0:
            raise ValidationError("cfl must lie in (0, 1)")
        if not 0.0 < cfg["tail_fraction"] < 1.0:
            raise ValidationError("tail_fraction must lie in (0, 1)")
        if cfg["ncells"] < 2:
            raise ValidationError("ncells must be at least 2")
        table = cfg["wedge_table"]
        if not isinstance(table, list) or not all(isinstance(r, list) and len(r) == 2 for r in table):
            raise ValidationError("wedge_table must be a list of [x1, slope] pairs")
        if not isinstance(cfg["cauchy"], dict):
            raise ValidationError("cauchy must be an object")
        allowed = {"kind", "amplitude", "component", "center", "width", "teeth"}
        if set(cfg["cauchy"]) - allowed:
            raise ValidationError(f"unknown cauchy keys: {sorted(set(cfg['cauchy']) - allowed)}")
        env = os.environ.get("WEDGEFLOW_SEED")
        if env is not None:
            try:
                cfg["seed"] = int(env)
            except ValueError:
                raise ValidationError(f"WEDGEFLOW_SEED={env!r} is not an integer") from None
        if cfg["seed"] < 0:
            raise ValidationError("seed must be non-negative")
    if sub == "selfsim":
        c0 = cfg["rho0"] ** (0.5 * (g.gamma - 1.0))
        if not cfg["u10"] > c0:
            raise NotSupersonic(f"u10={cfg['u10']} must exceed c0={c0}")
        if out["theta_w"] <= 0:
            raise ValidationError("theta_w_deg must be positive")
        if cfg["nsamples"] < 1 or cfg["geometry_points"] < 2:
            raise ValidationError("nsamples >= 1 and geometry_points >= 2 required")
    if sub == "unsteady":
        c0 = cfg["rho0"] ** (0.5 * (g.gamma - 1.0))
        if not cfg["u10"] > c0:
            raise NotSupersonic(f"u10={cfg['u10']} must exceed c0={c0}")
        if cfg["nx"] < 16 or cfg["ny"] < 16:
            raise ValidationError("nx and ny must be at least 16")
        if not 0.0 < cfg["cfl"] <= 0.5:
            raise ValidationError("cfl must lie in (0, 0.5]")
        if cfg["check_every"] < 1 or cfg["snapshot_every"] < 0:
            raise ValidationError("check_every >= 1 and snapshot_every >= 0 required")
        _positive(cfg, "tol")
    return out


# -- subcommand runners -------------------------------------------------------------
# Each returns the summary dict; files go under ``out`` when given.

def _upstream(cfg, g):
    from .polar import PotentialState
    if cfg["model"] == "euler":
        return state_from_mach(cfg["mach"], g, cfg["p0"], cfg["rho0"])
    c0 = math.sqrt(cfg["rho0"] ** (g.gamma - 1.0))
    return PotentialState(cfg["mach"] * c0, 0.0, cfg["rho0"])


def _crit(cfg, up, g):
    from .polar import critical_angles, potential_critical_angles
    return critical_angles(up, g) if cfg["model"] == "euler" else potential_critical_angles(up, g)


def _crit_dict(c):
    return {"theta_d_deg": math.degrees(c.theta_d), "theta_s_deg": math.degrees(c.theta_s),
            "beta_d_deg": math.degrees(c.beta_d), "beta_s_deg": math.degrees(c.beta_s),
            "u_detach": c.u_detach}


def _shock_dict(sh, model, g):
    d = sh.downstream
    if model == "euler":
        down = {"u1": d.u1, "u2": d.u2, "p": d.p, "rho": d.rho, "mach": mach_number(d, g)}
    else:
        down = {"u1": d.u1, "u2": d.u2, "p": potential_p(d.rho, g), "rho": d.rho,
                "mach": d.speed / d.c(g)}
    return {"beta_deg": math.degrees(sh.beta), "beta_rad": sh.beta,
            "deflection_deg": math.degrees(sh.deflection), "downstream": down}


def run_angles(cfg, v, out):
    up = _upstream(cfg, v["gas"])
    s = {"model": cfg["model"], "mach": cfg["mach"], "gamma": v["gas"].gamma}
    s.update(_crit_dict(_crit(cfg, up, v["gas"])))
    return s


def run_wedge(cfg, v, out):
    from .errors import DetachedError
    from .polar import Detached, potential_wedge_solutions, wedge_solutions
    g = v["gas"]
    up = _upstream(cfg, g)
    crit = _crit(cfg, up, g)
    if cfg["model"] == "euler":
        sol = wedge_solutions(up, v["theta_w"], g, crit)
    else:
        sol = potential_wedge_solutions(up, v["theta_w"], g, crit)
    if isinstance(sol, Detached):
        raise DetachedError(f"theta={cfg['theta_deg']} deg exceeds detachment "
                            f"{math.degrees(crit.theta_d):.6f} deg")
    return {"model": cfg["model"], "mach": cfg["mach"], "gamma": g.gamma,
            "theta_deg": cfg["theta_deg"], "degenerate_at_detachment": sol.degenerate_at_detachment,
            "weak": _shock_dict(sol.weak, cfg["model"], g),
            "strong": _shock_dict(sol.strong, cfg["model"], g),
            **_crit_dict(crit)}


def _potential_polar_rows(up, n, g):
    from .polar import potential_downstream_from_beta
    mu = math.asin(up.c(g) / up.speed)
    rows = []
    for b in np.linspace(mu, 0.5 * math.pi, n):
        sh = potential_downstream_from_beta(up, float(b), g)
        d = sh.downstream
        rows.append((float(b), d.u1, d.u2, potential_p(d.rho, g), d.rho, d.speed / d.c(g), sh.deflection))
    return rows


def run_polar(cfg, v, out):
    from .polar import PolarCurve, polar_curve
    g = v["gas"]
    up = _upstream(cfg, g)
    if cfg["model"] == "euler":
        rows = list(polar_curve(up, cfg["n"], g).rows())
    else:
        rows = _potential_polar_rows(up, cfg["n"], g)
    if out:
        emit.write_csv(out / "polar.csv", PolarCurve.CSV_COLUMNS, rows)
    s = {"model": cfg["model"], "mach": cfg["mach"], "gamma": g.gamma, "n": len(rows),
         "max_deflection_deg": math.degrees(max(r[6] for r in rows))}
    s.update(_crit_dict(_crit(cfg, up, g)))
    return s


def run_glimm(cfg, v, out):
    from .glimm import (MarchConfig, WedgeGeometry, asymptotics_estimate, cells_for_downstream,
                        make_cauchy_data, march)
    g = v["gas"]
    bg = state_from_mach(cfg["mach"], g, cfg["p0"], cfg["rho0"])
    table = sorted((float(x), float(s)) for x, s in cfg["wedge_table"])
    if not table or table[0][0] != 0.0:
        table = [(0.0, 0.0)] + table
    geom = WedgeGeometry(v["theta_w"], tuple(x for x, _ in table), tuple(s for _, s in table))
    cz = dict(cfg["cauchy"])
    kind = cz.pop("kind", "constant")
    amp = float(cz.pop("amplitude", 0.0))
    data = make_cauchy_data(kind, amp, bg, g=g, **cz)
    dx2 = cfg["dx2"] or cells_for_downstream(v["theta_w"], bg, cfg["x1_max"], cfg["ncells"], g)
    mc = MarchConfig(dx2=dx2, x1_max=cfg["x1_max"], cfl=cfg["cfl"], dx1=cfg["dx1"], seed=cfg["seed"])
    _, front, diag = march(geom, data, mc, g)
    a = asymptotics_estimate(diag, cfg["tail_fraction"])
    if out:
        emit.write_csv(out / "front.csv", ("x1", "sigma", "sigma_slope"), front.rows())
        emit.write_csv(out / "diagnostics.csv",
                       ("x1", "tv", "p_mean", "angle_mean", "tv_below", "wall_defect_rad"),
                       zip(diag.x1, diag.tv_per_slice, diag.p_mean, diag.angle_mean,
                           diag.tv_below, diag.wall_defect))
    return {"s_inf": a.s_inf, "p_inf": a.p_inf, "angle_inf": a.angle_inf, "s_std": a.s_std,
            "p_std": a.p_std, "angle_std": a.angle_std, "b_slope_inf": a.b_slope_inf,
            "max_tv": diag.max_tv, "slip_defect_rad": diag.slip_defect, "dx2": dx2,
            "steps": len(diag.x1) - 1, "seed": cfg["seed"],
            "front_min_gap": float(np.min(front.sigma[1:] - geom.b(front.x1[1:]) -
                                          front.x1[1:] * math.tan(geom.theta_w)))}


def run_selfsim(cfg, v, out):
    from .selfsim import build_skeleton, geometry_rows, verify_skeleton
    g = v["gas"]
    sk = build_skeleton(g, cfg["u10"], cfg["rho0"], v["theta_w"])
    rep = verify_skeleton(sk, cfg["nsamples"])
    if out:
        emit.write_json(out / "skeleton.json", sk.to_dict())
        emit.write_csv(out / "geometry.csv", ("curve", "xi1", "xi2"),
                       geometry_rows(sk, cfg["geometry_points"]))
    return {"branch": sk.branch.value, "passed": rep.passed, "flags": rep.flags,
            "rho1": sk.rho1, "rho2": sk.rho2, "s1_position": sk.s1_position,
            "beta_deg": math.degrees(sk.beta), "rh_s0": rep.rh_s0, "rh_s1": rep.rh_s1,
            "jump_s0": rep.jump_s0, "jump_s1": rep.jump_s1}


def _field_rows(state, grid):
    X, Y = np.meshgrid(grid.xc(), grid.yc(), indexing="ij")
    return zip(X.ravel(), Y.ravel(), state.rho.ravel(), state.phi.ravel())


def run_unsteady(cfg, v, out):
    from .polar import PotentialState, potential_wedge_solutions
    from .unsteady import Grid2D, run_to_steady
    g = v["gas"]
    grid = Grid2D.box(cfg["nx"], cfg["ny"], cfg["lx"], cfg["ly"])
    hdr = ("x", "y", "rho", "phi")

    def observer(state):
        k = cfg["snapshot_every"]
        if out and k and state.steps % k == 0:
            emit.write_csv(out / f"snapshot_{state.steps:07d}.csv", hdr, _field_rows(state, grid))

    failure = None
    try:
        state, fit, rep = run_to_steady(grid, g, cfg["u10"], cfg["rho0"], v["theta_w"], cfg["cfl"],
                                        cfg["t_max"], cfg["check_every"], tol=cfg["tol"],
                                        observer=observer, init=cfg["init"])
    except NonConvergence as exc:
        state, fit, rep, failure = exc.state, exc.fit, exc.report, exc
    s = {"t": state.t, "steps": rep.steps, "converged": rep.converged,
         "mass_error": rep.mass_error, "residual": rep.residual_series[-1],
         "l1_defect": rep.l1_series[-1]}
    fit_d = None
    if fit is not None:
        fit_d = {"angle_deg": math.degrees(fit.angle), "angle_wall_deg": math.degrees(fit.angle_wall),
                 "rms": fit.rms, "npoints": fit.npoints,
                 "downstream": {"rho": fit.downstream_sample[0], "speed": fit.downstream_sample[1]}}
        if v["theta_w"] > 0:
            sol = potential_wedge_solutions(PotentialState(cfg["u10"], 0.0, cfg["rho0"]), v["theta_w"], g)
            fit_d["weak_beta_deg"] = math.degrees(sol.weak.beta)
            fit_d["strong_beta_deg"] = math.degrees(sol.strong.beta)
            fit_d["weak_rho"] = sol.weak.downstream.rho
    s["shockfit"] = fit_d
    if out:
        emit.write_json(out / "shockfit.json", fit_d)
        emit.write_csv(out / "convergence.csv", ("t", "residual", "l1_defect", "selfsim_defect"), rep.rows())
        emit.write_csv(out / "field.csv", hdr, _field_rows(state, grid))
    if failure is not None:
        failure.summary = s
        raise failure
    return s


RUNNERS = {"polar": run_polar, "wedge": run_wedge, "angles": run_angles,
           "glimm": run_glimm, "selfsim": run_selfsim, "unsteady": run_unsteady}


def _error_name(exc) -> str:
    return getattr(exc, "name", None) or type(exc).__name__


def dispatch(argv=None, stdout=None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""
    stdout = stdout or sys.stdout
    ns = build_parser().parse_args(argv)
    sub = ns.subcommand
    out = Path(ns.out) if ns.out else None
    try:
        cfg = resolve_config(sub, ns)
        derived = validate(sub, cfg)
        summary = RUNNERS[sub](cfg, derived, out)
        code = EXIT_OK
        line = {"subcommand": sub, "status": "ok", **summary}
    except (ValidationError, NotSupersonic) as exc:
        code = EXIT_INVALID
        line = {"subcommand": sub, "error": _error_name(exc), "message": str(exc)}
    except WedgeFlowError as exc:
        code = EXIT_NUMERICAL
        line = {"subcommand": sub, "error": _error_name(exc), "message": str(exc),
                **({"partial": exc.summary} if hasattr(exc, "summary") else {})}
    if out:
        emit.write_json(out / "summary.json", line)
    stdout.write(emit.dumps(line) + "\n")
    return code


def main(argv=None):
    sys.exit(dispatch(argv))
