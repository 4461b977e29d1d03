"""Command-line entry point: config parsing, run orchestration, file emission.

Commands: simulate | limit-cycle | decompose | linearize | hj | compare.
Configuration is a single JSON document; --model and --output flags override
it.  All outputs are deterministic (byte-identical across reruns) and start
with a comment header echoing the full effective config and tool version.

Exit codes: 0 success, 2 validation error, 3 numerical abort (partial
outputs retained as *.partial.csv).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .compare import (
    SasdePotential,
    components_along_curve,
    variance_report,
    zero_gradient_curve,
)
from .errors import InvalidParameterError, KappaflowError
from .fields import MODEL_NAMES, ModelSpec, make_model, model_geometry
from .flow import find_limit_cycle, hausdorff_distance, integrate, resample_closed_curve
from .hjfd import PLinear, linear_slope_rdot, radial_speed, solve_forward_2d, solve_radial, PolarGridSpec
from .levelset import propagate
from .linearize import decompose_linear
from .output import (
    config_header_lines,
    levelset_run_summary,
    write_2d_csv,
    write_csv,
    write_json,
    write_levelset_run_csv,
    write_points_csv,
    write_radial_csv,
)

COMMANDS = ("simulate", "limit-cycle", "decompose", "linearize", "hj", "compare")

DEFAULT_CONFIG = {
    "model": {"name": "symm_rad", "params": {}},
    "simulate": {"x0": [0.1, 0.1], "dt": 1e-3, "n_steps": 20000},
    "limit_cycle": {"seed": [0.1, 0.1], "dt": 1e-3, "transient_time": 50.0,
                    "closure_tol": 1e-4, "n_reference": 1024, "max_time": 200.0},
    "levelset": {"dH": 0.2, "dP": 0.02, "epsilon": 1e-3, "cycles": 3,
                 "n_inward": 5, "n_outward": 5, "h_lc": None, "k_window": 64},
    "hj": {"dr": 1e-3, "r_max": None, "p0": 0.5, "q": 0.1,
           "mode": "linear-slope", "with_2d": False, "n_theta": 128},
    "compare": {"mu": 1.0, "n_curve": 1024},
    "output_dir": "out",
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path, model_name=None, output_dir=None) -> dict:
    config = DEFAULT_CONFIG
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            config = _merge(config, json.load(fh))
    if model_name is not None:
        config = _merge(config, {"model": {"name": model_name}})
    if output_dir is not None:
        config["output_dir"] = output_dir
    _validate_config(config)
    return config


def _validate_config(config: dict) -> None:
    name = config["model"]["name"]
    if name not in MODEL_NAMES:
        raise InvalidParameterError(
            f"unknown model {name!r}; valid models: {', '.join(MODEL_NAMES)}"
        )
    for block, keys in (
        ("simulate", ("dt",)),
        ("limit_cycle", ("dt", "closure_tol")),
        ("levelset", ("dH", "dP", "epsilon")),
        ("hj", ("dr",)),
    ):
        for key in keys:
            if not config[block][key] > 0:
                raise InvalidParameterError(f"{block}.{key} must be > 0, got {config[block][key]}")


def _field(config):
    return make_model(ModelSpec(config["model"]["name"], dict(config["model"]["params"])))


def _headers(config, command):
    echo = dict(config)
    echo["command"] = command
    return config_header_lines(echo, __version__)


def _analytic_H(config):
    try:
        return model_geometry(ModelSpec(config["model"]["name"], dict(config["model"]["params"]))).H
    except InvalidParameterError:
        return None


def cmd_simulate(config, outdir):
    field = _field(config)
    block = config["simulate"]
    traj = integrate(field, block["x0"], block["dt"], int(block["n_steps"]))
    write_points_csv(outdir / "trajectory.csv", traj.points, _headers(config, "simulate"))
    return 0


def _detected_cycle(config):
    field = _field(config)
    block = config["limit_cycle"]
    cycle = find_limit_cycle(
        field,
        block["seed"],
        dt=block["dt"],
        transient_time=block["transient_time"],
        closure_tol=block["closure_tol"],
        max_time=block["max_time"],
    )
    return field, cycle


def cmd_limit_cycle(config, outdir):
    field, cycle = _detected_cycle(config)
    n_ref = int(config["limit_cycle"]["n_reference"])
    pts = resample_closed_curve(cycle.points, n_ref)
    write_points_csv(outdir / "limit_cycle.csv", pts, _headers(config, "limit-cycle"))
    summary = {
        "config": config,
        "version": __version__,
        "period": cycle.period,
        "orientation": cycle.orientation,
        "n_points": int(len(pts)),
    }
    analytic_H = _analytic_H(config)
    if analytic_H is not None:
        h = np.array([analytic_H(x, y) for x, y in pts])
        summary["h_mean"] = float(h.mean())
        summary["h_std"] = float(h.std())
    write_json(outdir / "limit_cycle_summary.json", summary)
    return 0


def cmd_decompose(config, outdir):
    field, cycle = _detected_cycle(config)
    block = config["levelset"]
    run = propagate(
        field,
        cycle,
        dP=block["dP"],
        dH=block["dH"],
        n_inward=int(block["n_inward"]),
        n_outward=int(block["n_outward"]),
        epsilon=block["epsilon"],
        cycles=int(block["cycles"]),
        n_reference=int(config["limit_cycle"]["n_reference"]),
        h_lc=block["h_lc"],
        k_window=int(block["k_window"]),
    )
    aborted = run.aborted is not None
    stem = "levelsets.partial" if aborted else "levelsets"
    write_levelset_run_csv(outdir / f"{stem}.csv", run, _headers(config, "decompose"))
    summary = levelset_run_summary(run, analytic_H=_analytic_H(config))
    summary["cli_config"] = config
    summary["version"] = __version__
    write_json(outdir / f"{stem}_summary.json", summary)
    return 3 if aborted else 0


def cmd_linearize(config, outdir):
    field = _field(config)
    dec = decompose_linear(field)
    payload = dec.to_json_dict()
    payload["config"] = config
    payload["version"] = __version__
    if dec.warning:
        payload["warning"] = dec.warning
    write_json(outdir / "linearization.json", payload)
    return 0


def cmd_hj(config, outdir):
    field = _field(config)
    block = config["hj"]
    p = PLinear(float(block["p0"]), float(block["q"]))
    dr = float(block["dr"])
    mode = block["mode"]
    if mode not in ("linear-slope", "model-radial"):
        raise InvalidParameterError(
            f"unknown hj mode {mode!r}; valid: linear-slope, model-radial"
        )
    if mode == "linear-slope":
        rdot = linear_slope_rdot(p, dr)
        r_max = block["r_max"] if block["r_max"] else p.p0 / p.q + 1.0
    else:
        rdot = radial_speed(field)
        beta = field.params.get("beta")
        r_max = block["r_max"] if block["r_max"] else (np.sqrt(beta) if beta else 4.0)
    sol = solve_radial(rdot, p, dr, float(r_max))
    write_radial_csv(outdir / "hj_radial.csv", sol, _headers(config, "hj"))
    if block["with_2d"]:
        grid = PolarGridSpec(dr=dr, r_max=float(r_max), n_theta=int(block["n_theta"]))
        sol2 = solve_forward_2d(field, p, grid)
        write_2d_csv(outdir / "hj_2d.csv", sol2, _analytic_H(config), _headers(config, "hj"))
    return 0


def cmd_compare(config, outdir):
    mu = float(config["compare"]["mu"])
    n_curve = int(config["compare"]["n_curve"])
    config = _merge(config, {"model": {"name": "vdp_yuan", "params": {"mu": mu}}})
    field, cycle = _detected_cycle(config)
    run = propagate(
        field,
        cycle,
        dP=config["levelset"]["dP"],
        dH=config["levelset"]["dH"],
        n_inward=1,
        n_outward=0,
        epsilon=config["levelset"]["epsilon"],
        cycles=int(config["levelset"]["cycles"]),
        n_reference=n_curve,
        h_lc=config["levelset"]["h_lc"],
    )
    level0 = run.level(0)
    curve = level0.points
    potential = SasdePotential(mu)
    comp_ls = components_along_curve(field, None, level0)
    comp_sa = components_along_curve(field, curve, potential)
    report = variance_report(
        comp_ls,
        comp_sa,
        csv_path=outdir / "compare_components.csv",
        curve=curve,
        header_lines=_headers(config, "compare"),
    )
    zero_grad = zero_gradient_curve(mu, n_curve)
    summary = {
        "config": config,
        "version": __version__,
        "mu": mu,
        "hausdorff_p0_vs_zero_gradient": hausdorff_distance(curve, zero_grad),
        "components": report,
        "sa_w_zero_crossings": int(
            np.sum(np.diff(np.sign(comp_sa.w[np.isfinite(comp_sa.w)])) != 0)
        ),
    }
    write_json(outdir / "compare_summary.json", summary)
    write_points_csv(
        outdir / "zero_gradient_curve.csv", zero_grad, _headers(config, "compare")
    )
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kappaflow",
        description="Geometric decomposition xdot = kappa*grad(H) of planar limit-cycle systems",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, default=None, help="JSON config document")
    parser.add_argument("--output", type=Path, default=None, help="output directory")
    parser.add_argument("--model", type=str, default=None, help="catalog model name override")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config, args.model, args.output and str(args.output))
    except (InvalidParameterError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    outdir = Path(config["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    handler = {
        "simulate": cmd_simulate,
        "limit-cycle": cmd_limit_cycle,
        "decompose": cmd_decompose,
        "linearize": cmd_linearize,
        "hj": cmd_hj,
        "compare": cmd_compare,
    }[args.command]
    try:
        return handler(config, outdir)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KappaflowError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
