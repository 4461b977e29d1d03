"""Fixed-step trajectory integration, limit-cycle detection, curve resampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from .errors import DivergenceError, NoCycleError, NonConvergenceError, ShapeError
from .fields import PlanarVectorField

DEFAULT_DT = 1e-3
DEFAULT_TRANSIENT_TIME = 50.0
DEFAULT_CLOSURE_TOL = 1e-4
DEFAULT_MAX_LOOPS = 50


@dataclass(frozen=True)
class Trajectory:
    points: np.ndarray  # (n, 2)
    dt: float
    t0: float = 0.0


@dataclass(frozen=True)
class LimitCycle:
    """One closed loop of the attracting periodic orbit.

    `points` run once around the cycle; the closing segment back to points[0]
    is implied (last point != first).  orientation is +1 for counterclockwise
    winding about the origin, -1 for clockwise.
    """

    points: np.ndarray  # (n, 2)
    period: float
    orientation: int


def _rk4_step(rhs, x, y, dt):
    k1x, k1y = rhs(x, y)
    k2x, k2y = rhs(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y)
    k3x, k3y = rhs(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y)
    k4x, k4y = rhs(x + dt * k3x, y + dt * k3y)
    return (
        x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )


def integrate(field: PlanarVectorField, x0, dt: float, n_steps: int) -> Trajectory:
    """Classical fixed-step 4th-order Runge-Kutta trajectory of n_steps + 1 points."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x, y = float(x0[0]), float(x0[1])
    if not (np.isfinite(x) and np.isfinite(y)):
        raise ValueError(f"non-finite initial state {x0}")
    out = np.empty((n_steps + 1, 2))
    out[0] = (x, y)
    for i in range(n_steps):
        x, y = _rk4_step(field.rhs, x, y, dt)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise DivergenceError(f"trajectory diverged at step {i + 1}", step=i + 1)
        out[i + 1] = (x, y)
    return Trajectory(out, dt)


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two closed polylines.

    Vertex-to-segment based, so two samplings of the same curve measure
    (near) zero even when their vertices interleave.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return max(_points_to_polyline(a, b).max(), _points_to_polyline(b, a).max())


def point_set_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two raw point sets."""
    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


def _points_to_polyline(pts: np.ndarray, poly: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Distance from each point to the closed polyline through `poly`."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    ab2 = (ab * ab).sum(axis=1)
    ab2_safe = np.where(ab2 == 0.0, 1.0, ab2)
    out = np.empty(len(pts))
    for i0 in range(0, len(pts), chunk):
        p = pts[i0 : i0 + chunk]
        ap = p[:, None, :] - a[None, :, :]
        t = np.clip((ap * ab[None, :, :]).sum(axis=-1) / ab2_safe[None, :], 0.0, 1.0)
        d = ap - t[..., None] * ab[None, :, :]
        out[i0 : i0 + chunk] = np.sqrt((d * d).sum(axis=-1).min(axis=1))
    return out


def _aligned_loop_deviation(a: np.ndarray, b: np.ndarray, n: int = 1024) -> float:
    """Max pointwise distance between two loops resampled from their shared anchor.

    Both loops start at (successive interpolated crossings of) the same
    Poincare section, so equal arc fractions correspond; this measures the
    curve-to-curve convergence without sampling-phase artifacts.
    """
    ra = resample_closed_curve(a, n)
    rb = resample_closed_curve(b, n)
    return float(np.linalg.norm(ra - rb, axis=1).max())


def find_limit_cycle(
    field: PlanarVectorField,
    seed,
    dt: float = DEFAULT_DT,
    transient_time: float = DEFAULT_TRANSIENT_TIME,
    closure_tol: float = DEFAULT_CLOSURE_TOL,
    max_loops: int = DEFAULT_MAX_LOOPS,
    max_time: float = 200.0,
) -> LimitCycle:
    """Detect the attracting cycle around the origin reachable from `seed`.

    Sheds the transient, then anchors a Poincare half-line at the
    post-transient polar angle and collects loops between successive
    crossings.  A loop is accepted once it matches its predecessor to
    `closure_tol` in Hausdorff distance.
    """
    x, y = float(seed[0]), float(seed[1])
    if x == 0.0 and y == 0.0:
        raise NoCycleError("seed coincides with the fixed point")
    n_transient = int(round(transient_time / dt))
    for i in range(n_transient):
        x, y = _rk4_step(field.rhs, x, y, dt)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise DivergenceError(f"transient diverged at step {i + 1}", step=i + 1)
    if np.hypot(x, y) <= 1e-3:
        raise NoCycleError(
            "post-transient state is inside the fixed-point neighborhood; no cycle reached"
        )

    winding = 0.0  # accumulated angle about the origin, anchor = post-transient angle
    t = 0.0
    max_steps = int(round(max_time / dt))
    prev_loop = None
    prev_cross_t = 0.0
    loop_pts = [(x, y)]
    loops_compared = 0
    best = np.inf
    for i in range(max_steps):
        xn, yn = _rk4_step(field.rhs, x, y, dt)
        if not (np.isfinite(xn) and np.isfinite(yn)):
            raise DivergenceError(f"integration diverged at step {i + 1}", step=i + 1)
        t += dt
        dphi = np.arctan2(
            x * yn - y * xn, x * xn + y * yn
        )  # wrapped angle increment about the origin
        w_new = winding + dphi
        target = 2.0 * np.pi * np.sign(dphi) if dphi != 0 else None
        if target is not None and (winding - target) * (w_new - target) <= 0 and abs(w_new) >= abs(target):
            # crossed the section: interpolate the crossing state
            frac = (target - winding) / dphi
            xc = x + frac * (xn - x)
            yc = y + frac * (yn - y)
            tc = t - dt + frac * dt
            loop = np.array(loop_pts)
            period = tc - prev_cross_t
            if prev_loop is not None:
                loops_compared += 1
                d = _aligned_loop_deviation(loop, prev_loop)
                best = min(best, d)
                if d < closure_tol:
                    cycle = LimitCycle(loop, period, int(np.sign(target)))
                    _validate_cycle(field, cycle, closure_tol, dt)
                    return cycle
                if loops_compared >= max_loops:
                    raise NonConvergenceError(
                        f"loop mismatch stayed at {best:.3e} >= closure_tol={closure_tol} "
                        f"after {max_loops} loops",
                        achieved=best,
                    )
            prev_loop = loop
            prev_cross_t = tc
            loop_pts = [(xc, yc)]
            winding = w_new - target
        else:
            winding = w_new
        loop_pts.append((xn, yn))
        x, y = xn, yn
    raise NoCycleError(f"no section crossing within max_time={max_time}")


def _validate_cycle(field, cycle, closure_tol, dt):
    pts = cycle.points
    r = np.hypot(pts[:, 0], pts[:, 1])
    if r.min() <= 1e-3:
        raise NoCycleError("detected loop passes through the fixed-point neighborhood")
    speeds = np.array([np.hypot(*field.rhs(px, py)) for px, py in pts[:: max(1, len(pts) // 64)]])
    if speeds.min() == 0.0:
        raise NoCycleError("rhs vanishes on the detected loop")
    # the closing segment (last point advanced one step) must pass within
    # closure_tol of the loop start
    nxt = np.array(_rk4_step(field.rhs, pts[-1, 0], pts[-1, 1], dt))
    seg = nxt - pts[-1]
    seg2 = float(seg @ seg)
    tpar = 0.0 if seg2 == 0.0 else float(np.clip((pts[0] - pts[-1]) @ seg / seg2, 0.0, 1.0))
    residual = float(np.linalg.norm(pts[0] - (pts[-1] + tpar * seg)))
    if residual >= closure_tol:
        raise NonConvergenceError(
            "loop closure residual exceeds closure_tol", achieved=residual
        )


def resample_closed_curve(points, n: int) -> np.ndarray:
    """Resample a simple closed polyline to n points equally spaced by arc length.

    Orientation is preserved; the first output point is the first input point.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ShapeError("need at least 3 planar points forming a closed polyline")
    closed = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] <= 0.0:
        raise ShapeError("degenerate (zero-length) curve")
    s_new = np.linspace(0.0, s[-1], n, endpoint=False)
    return np.column_stack(
        [np.interp(s_new, s, closed[:, 0]), np.interp(s_new, s, closed[:, 1])]
    )


def curve_perimeter(points) -> float:
    pts = np.asarray(points, dtype=float)
    closed = np.vstack([pts, pts[:1]])
    return float(np.linalg.norm(np.diff(closed, axis=0), axis=1).sum())


def winding_number(points, about=(0.0, 0.0)) -> int:
    """Signed number of turns a closed polyline makes about a point."""
    pts = np.asarray(points, dtype=float) - np.asarray(about, dtype=float)
    closed = np.vstack([pts, pts[:1]])
    x, y = closed[:-1, 0], closed[:-1, 1]
    xn, yn = closed[1:, 0], closed[1:, 1]
    ang = np.arctan2(x * yn - y * xn, x * xn + y * yn)
    return int(round(ang.sum() / (2.0 * np.pi)))
