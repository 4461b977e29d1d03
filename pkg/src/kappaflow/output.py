"""Deterministic CSV/JSON emission: 17 significant digits, # header comments."""

from __future__ import annotations

import json
import math
from pathlib import Path


def fmt(value) -> str:
    """Format a number with 17 significant digits (round-trippable float64)."""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def config_header_lines(config: dict, tool_version: str) -> list:
    return [
        f"kappaflow version {tool_version}",
        "config: " + json.dumps(config, sort_keys=True, separators=(",", ":")),
    ]


def write_csv(path, header_lines, colnames, rows) -> None:
    """Comma-delimited CSV with #-prefixed comment header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(colnames) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_points_csv(path, points, header_lines=()) -> None:
    """index, x, y rows for trajectories and cycles."""
    rows = [(i, p[0], p[1]) for i, p in enumerate(points)]
    write_csv(path, header_lines, ("index", "x", "y"), rows)


def write_levelset_run_csv(path, run, header_lines=()) -> None:
    rows = []
    for lv in run.levels:
        for j, (x, y) in enumerate(lv.points):
            rows.append((lv.level_index, lv.p_level, lv.h_assigned, j, x, y, lv.w_estimates[j]))
    write_csv(
        path,
        header_lines,
        ("level_index", "p_level", "h_assigned", "point_index", "x", "y", "w_est"),
        rows,
    )


def levelset_run_summary(run, analytic_H=None) -> dict:
    """Per-level closure error and H statistics for the run's JSON summary."""
    levels = []
    for lv in run.levels:
        entry = {
            "level_index": lv.level_index,
            "p_level": lv.p_level,
            "h_assigned": lv.h_assigned,
            "n_points": int(len(lv.points)),
            "closure_error": lv.closure_error,
        }
        if analytic_H is not None:
            import numpy as np

            h = np.array([analytic_H(x, y) for x, y in lv.points])
            entry["h_true_mean"] = float(h.mean())
            entry["h_true_std"] = float(h.std())
            entry["h_abs_error_max"] = float(np.abs(h - lv.h_assigned).max())
        levels.append(entry)
    summary = {
        "config": run.config,
        "h_limit_cycle": run.h_limit_cycle,
        "levels": levels,
        "notes": run.notes,
    }
    if run.aborted is not None:
        summary["aborted"] = run.aborted
    return summary


def write_radial_csv(path, sol, header_lines=()) -> None:
    """r, H, root_lo, root_hi, valid for an HjRadialSolution."""
    rows = []
    for i in range(len(sol.r_grid)):
        rows.append((sol.r_grid[i], sol.h_values[i], sol.roots[i, 0], sol.roots[i, 1], 1))
    if sol.r_terminate is not None:
        rows.append((sol.r_terminate, float("nan"), float("nan"), float("nan"), 0))
    write_csv(path, header_lines, ("r", "H", "root_lo", "root_hi", "valid"), rows)


def write_2d_csv(path, sol, analytic_H=None, header_lines=()) -> None:
    """r, theta, H_est, H_true_if_known, valid for an Hj2dSolution."""
    rows = []
    for i, r in enumerate(sol.r_grid):
        for m, th in enumerate(sol.theta_grid):
            h_true = (
                analytic_H(r * math.cos(th), r * math.sin(th))
                if analytic_H is not None
                else float("nan")
            )
            rows.append((r, th, sol.h_values[i, m], h_true, int(sol.valid[i, m])))
    write_csv(path, header_lines, ("r", "theta", "H_est", "H_true_if_known", "valid"), rows)
