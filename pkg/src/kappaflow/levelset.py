"""Level-set integration: propagate contours of H from the limit cycle.

Each contour is traced by forward-Euler steps along the pseudo-complement
R_perp * kappa^-1 * xdot, where kappa = (p_level, w) is assembled per step
from the prescribed p of the target level and a pointwise w estimate.  The
w estimate comes from finite-difference gradient candidates against the
previous (reference) contour: the magnitude condition fixes |sigma| per
candidate, and the winner is the candidate whose kappa rotation angle
best matches the measured angle between the velocity and the candidate
gradient.

Sign conventions
----------------
Levels are labelled p_level = level_index * dP (negative inward, positive
outward; the limit cycle is level 0 with p = 0).  The trace is stable only
when candidate gradients point down-gradient, so trace_level negates the
raw candidates (point - ref) for outward runs; the internal w estimate then
carries the opposite sign of the true rotational component on both sides.
Stored per-point `w_estimates` and `grad_estimates` are flipped back to the
physical orientation (w matches the true w, gradients point up-gradient);
the physical dissipative component on a contour is -p_level.  The triple
(-p_level, w_estimates[i], grad_estimates[i]) reconstructs the velocity via
apply_kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import (
    AbortedTraceError,
    CoincidentPointError,
    NoValidWError,
    ShapeError,
    SingularKappaError,
    StagnationError,
)
from .fields import KappaForm, PlanarVectorField
from .flow import LimitCycle, resample_closed_curve, winding_number
from .linearize import kappa0_at_origin

DEFAULT_EPSILON = 1e-3
DEFAULT_CYCLES = 3
DEFAULT_K_WINDOW = 64
DEFAULT_N_REFERENCE = 1024
DEFAULT_MAX_STEPS = 10_000_000


def wrap_angle(a):
    """Wrap angle(s) to (-pi, pi]."""
    return -((-np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi)


@dataclass(frozen=True)
class CandidateSet:
    """Finite-difference gradient guesses of one probe point against a reference.

    ds[j] is |point - ref_j|, v[j] the unit direction from ref_j to the
    point, grad[j] = |dH / ds_j| * v[j].  None of these is yet "the"
    gradient; the angle objective in estimate_w selects among them.
    """

    ds: np.ndarray        # (m,)
    v: np.ndarray         # (m, 2)
    grad: np.ndarray      # (m, 2)
    indices: np.ndarray   # (m,) positions in the reference array

    def __len__(self):
        return len(self.ds)

    def flipped(self) -> "CandidateSet":
        return CandidateSet(self.ds, -self.v, -self.grad, self.indices)


@dataclass(frozen=True)
class WEstimate:
    w: float              # signed winner
    grad: np.ndarray      # winning gradient candidate
    index: int            # position in the reference array
    objective: float      # squared angle mismatch of the winner


@dataclass
class LevelSet:
    """One closed discretized contour of H."""

    level_index: int
    p_level: float
    h_assigned: float
    points: np.ndarray                      # (m, 2) final-cycle trace
    w_estimates: np.ndarray                 # (m,) physical sign
    closure_error: float
    grad_estimates: Optional[np.ndarray] = None  # (m, 2) physical orientation
    velocities: Optional[np.ndarray] = None      # (m, 2) field at the points


@dataclass
class LevelSetRun:
    config: dict
    levels: list                            # sorted by level_index
    h_limit_cycle: float
    aborted: Optional[dict] = None          # {"level_index": int, "reason": str}
    notes: list = dc_field(default_factory=list)

    def level(self, index: int) -> LevelSet:
        for lv in self.levels:
            if lv.level_index == index:
                return lv
        raise KeyError(f"no level with index {index}")


def _reference_points(reference) -> np.ndarray:
    if isinstance(reference, LevelSet):
        return np.asarray(reference.points, dtype=float)
    if isinstance(reference, LimitCycle):
        return np.asarray(reference.points, dtype=float)
    pts = np.asarray(reference, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ShapeError("reference must be an (n, 2) point array, LevelSet, or LimitCycle")
    return pts


def estimate_gradient_candidates(point, reference, dH: float, indices=None) -> CandidateSet:
    """Gradient guesses |dH/ds_j| * v_j for each reference point j.

    `indices` restricts the candidates to a subset of reference rows
    (trace_level passes the window of nearest indices).
    """
    if dH == 0.0:
        raise ValueError("dH must be nonzero")
    ref = _reference_points(reference)
    if indices is None:
        indices = np.arange(len(ref))
    else:
        indices = np.asarray(indices, dtype=int)
    pt = np.asarray(point, dtype=float)
    d = pt[None, :] - ref[indices]
    ds = np.hypot(d[:, 0], d[:, 1])
    if np.any(ds < 1e-9):
        j = int(indices[int(np.argmin(ds))])
        raise CoincidentPointError(f"probe coincides with reference point {j}")
    v = d / ds[:, None]
    grad = np.abs(dH) / ds[:, None] * v
    return CandidateSet(ds, v, grad, indices)


def estimate_w(point, velocity, candidates: CandidateSet, p_level: float, dH: float) -> WEstimate:
    """Select w and the gradient among the candidates by the angle objective.

    For each candidate j both signs of
    w_j = sqrt(|velocity|^2 * dH^-2 * ds_j^2 - p_level^2) are scored by
    (alpha_delta - alpha_R)^2 with alpha_R = atan2(w_j, p_level) and
    alpha_delta the wrapped angle from the candidate gradient to the
    velocity.  Ties break toward the smallest ds.
    """
    vel = np.asarray(velocity, dtype=float)
    speed2 = float(vel @ vel)
    if speed2 == 0.0:
        raise ValueError("velocity must be nonzero")
    w2 = speed2 * candidates.ds**2 / (dH * dH) - p_level * p_level
    ok = w2 >= 0.0
    if not np.any(ok):
        deficit = float((p_level * p_level - speed2 * candidates.ds**2 / (dH * dH)).min())
        raise NoValidWError(
            f"all {len(candidates)} candidates have negative discriminant "
            f"(minimal deficit {deficit:.3e})",
            deficit=deficit,
        )
    wj = np.sqrt(w2[ok])
    ds_ok = candidates.ds[ok]
    idx_ok = candidates.indices[ok]
    grad_ok = candidates.grad[ok]
    a_vel = math.atan2(vel[1], vel[0])
    a_grad = np.arctan2(candidates.v[ok, 1], candidates.v[ok, 0])
    a_delta = wrap_angle(a_vel - a_grad)

    best = None  # (objective, ds, w, grad, index)
    for sign in (1.0, -1.0):
        a_r = np.arctan2(sign * wj, p_level)
        obj = wrap_angle(a_delta - a_r) ** 2
        order = np.lexsort((ds_ok, obj))
        k = order[0]
        cand = (float(obj[k]), float(ds_ok[k]), float(sign * wj[k]), grad_ok[k], int(idx_ok[k]))
        if best is None or cand[:2] < best[:2]:
            best = cand
    return WEstimate(w=best[2], grad=best[3], index=best[4], objective=best[0])


def pseudo_complement(velocity, kappa: KappaForm) -> np.ndarray:
    """R_perp * kappa^-1 * velocity: the estimated tangent to the H contour."""
    d = kappa.det()
    if d == 0.0:
        raise SingularKappaError("kappa with p = w = 0 cannot be inverted")
    vel = np.asarray(velocity, dtype=float)
    gx = (kappa.p * vel[0] + kappa.w * vel[1]) / d
    gy = (kappa.p * vel[1] - kappa.w * vel[0]) / d
    return np.array([-gy, gx])


def _outward_normal(ref: np.ndarray) -> np.ndarray:
    tangent = ref[1] - ref[-1]
    n = np.array([tangent[1], -tangent[0]])
    if np.dot(n, ref[0] - ref.mean(axis=0)) < 0:
        n = -n
    return n / np.linalg.norm(n)


def _window_indices(n_ref: int, center: int, k: int) -> np.ndarray:
    return (np.arange(k) - k // 2 + center) % n_ref


N_SUBDIVIDE = 16  # sub-vertex refinement resolution per adjacent segment
_SUB_T = np.linspace(0.0, 1.0, N_SUBDIVIDE + 1)[:, None]


def _subdivided_reference(ref: np.ndarray, j_star: int) -> np.ndarray:
    """Footpoints subdividing the two reference segments adjacent to vertex j_star.

    Vertex-level candidates quantize the candidate direction by the
    reference spacing; sub-vertex footpoints remove that granularity from
    the stored w and gradient estimates.
    """
    n_ref = len(ref)
    a, b, c = ref[(j_star - 1) % n_ref], ref[j_star], ref[(j_star + 1) % n_ref]
    return np.vstack([a + (b - a) * _SUB_T, b + (c - b) * _SUB_T[1:]])


def _select_w(x, vel_x, vel_y, ref_pts, p_eff, dH, orient):
    """Fast-path candidate selection; same math as estimate_w on the same points.

    orient = +1 keeps candidate directions as point - ref (inward traces),
    -1 negates them (down-gradient orientation of outward traces).
    Returns (w, grad, ds, local_index, objective) or a NoValidWError deficit
    as (None, deficit).
    """
    dx = x[0] - ref_pts[:, 0]
    dy = x[1] - ref_pts[:, 1]
    ds2 = dx * dx + dy * dy
    speed2 = vel_x * vel_x + vel_y * vel_y
    w2 = speed2 * ds2 / (dH * dH) - p_eff * p_eff
    ok = w2 >= 0.0
    if not ok.any():
        return None, float((p_eff * p_eff - speed2 * ds2 / (dH * dH)).min())
    wj = np.sqrt(w2[ok])
    ds = np.sqrt(ds2[ok])
    a_delta = wrap_angle(
        math.atan2(vel_y, vel_x) - np.arctan2(orient * dy[ok], orient * dx[ok])
    )
    a_r = np.arctan2(wj, p_eff)  # atan2(-w, p) = -atan2(w, p)
    obj_pos = wrap_angle(a_delta - a_r) ** 2
    obj_neg = wrap_angle(a_delta + a_r) ** 2
    kp = int(np.argmin(obj_pos))
    kn = int(np.argmin(obj_neg))
    if (obj_pos[kp], ds[kp]) <= (obj_neg[kn], ds[kn]):
        k, w_win, obj = kp, float(wj[kp]), float(obj_pos[kp])
    else:
        k, w_win, obj = kn, -float(wj[kn]), float(obj_neg[kn])
    scale = orient * abs(dH) / (ds[k] * ds[k])
    grad = np.array([scale * dx[ok][k], scale * dy[ok][k]])
    local = int(np.flatnonzero(ok)[k])
    return (w_win, grad, float(ds[k]), local, obj), None


def trace_level(
    field: PlanarVectorField,
    reference,
    p_level: float,
    dH: float,
    epsilon: float = DEFAULT_EPSILON,
    cycles: int = DEFAULT_CYCLES,
    k_window: int = DEFAULT_K_WINDOW,
    full_scan: bool = False,
    seed_gradient_scale: Optional[float] = None,
    level_index: Optional[int] = None,
    h_assigned: float = float("nan"),
    max_steps: int = DEFAULT_MAX_STEPS,
) -> LevelSet:
    """Trace one contour from a closed reference; dH < 0 runs inward, dH > 0 outward.

    The effective ladder label is p_eff = sign(dH) * |p_level| (the stable
    orientation; see the module docstring).  After `cycles` full windings
    about the origin the final cycle's points become the returned LevelSet.
    """
    ref = _reference_points(reference)
    n_ref = len(ref)
    if n_ref < 3:
        raise ShapeError("reference needs at least 3 points")
    if p_level == 0.0:
        raise ValueError("p_level must be nonzero for a trace (the reference has p = 0)")
    p_eff = math.copysign(abs(p_level), dH)
    inward = dH < 0

    normal = _outward_normal(ref)
    if seed_gradient_scale is None:
        k0 = kappa0_at_origin(field)
        speed0 = float(np.hypot(*field.rhs(ref[0, 0], ref[0, 1])))
        seed_gradient_scale = speed0 / abs(k0.w) if k0.w != 0.0 else speed0
    offset = abs(dH) / seed_gradient_scale
    x = ref[0] + (-1.0 if inward else 1.0) * offset * normal

    winding = 0.0
    target_winding = 2.0 * np.pi * cycles
    keep_from = 2.0 * np.pi * (cycles - 1)
    phi_prev = math.atan2(x[1], x[0])
    pts, ws, grads, vels = [], [], [], []

    j_near = int(np.argmin(np.hypot(*(x[None, :] - ref).T)))
    k_window = min(k_window, n_ref)
    orient = 1.0 if inward else -1.0  # candidates always end up down-gradient

    for step in range(max_steps):
        if full_scan:
            idx = np.arange(n_ref)
        else:
            idx = _window_indices(n_ref, j_near, k_window)
        window = ref[idx]
        ds2 = (x[0] - window[:, 0]) ** 2 + (x[1] - window[:, 1]) ** 2
        jmin = int(np.argmin(ds2))
        j_near = int(idx[jmin])
        if ds2[jmin] < 1e-18:
            # sitting on a reference point: nudge radially off it
            radial = x / max(np.linalg.norm(x), 1e-12)
            x = x + 10 * epsilon * (-radial if inward else radial)
            continue
        vel_x, vel_y = field.rhs(x[0], x[1])
        sel, deficit = _select_w(x, vel_x, vel_y, window, p_eff, dH, orient)
        if sel is not None:
            # sub-vertex refinement around the winning vertex
            j_star = int(idx[sel[3]])
            sel, deficit = _select_w(
                x, vel_x, vel_y, _subdivided_reference(ref, j_star), p_eff, dH, orient
            )
        if sel is None:
            raise AbortedTraceError(
                f"no valid w at step {step} (winding {winding:.3f}): "
                f"all candidates have negative discriminant (minimal deficit {deficit:.3e})",
                partial_points=np.array(pts) if pts else np.empty((0, 2)),
                step=step,
            )
        w_est, grad, _, _, _ = sel
        # x <- x + eps * normalized(R_perp kappa^-1 vel), kappa = (p_eff, w_est)
        det = p_eff * p_eff + w_est * w_est
        gx = (p_eff * vel_x + w_est * vel_y) / det
        gy = (p_eff * vel_y - w_est * vel_x) / det
        norm = math.hypot(gx, gy)
        x = np.array([x[0] - epsilon * gy / norm, x[1] + epsilon * gx / norm])
        phi = math.atan2(x[1], x[0])
        dphi = phi - phi_prev
        if dphi > np.pi:
            dphi -= 2.0 * np.pi
        elif dphi <= -np.pi:
            dphi += 2.0 * np.pi
        winding += dphi
        phi_prev = phi
        if abs(winding) >= keep_from:
            pts.append(x)
            ws.append(w_est)
            grads.append(grad)
            vels.append((vel_x, vel_y))
        if abs(winding) >= target_winding:
            break
    else:
        raise StagnationError(
            f"winding {abs(winding):.3f} of {target_winding:.3f} after {max_steps} steps",
            winding=abs(winding),
            steps=max_steps,
        )

    points = np.array(pts)
    closure_error = float(np.linalg.norm(points[0] - points[-1]))
    # flip stored estimates to the physical orientation (see module docstring)
    w_arr = -np.array(ws)
    grad_arr = -np.array(grads)
    return LevelSet(
        level_index=level_index if level_index is not None else int(math.copysign(1, dH)),
        p_level=p_eff,
        h_assigned=h_assigned,
        points=points,
        w_estimates=w_arr,
        closure_error=closure_error,
        grad_estimates=grad_arr,
        velocities=np.array(vels, dtype=float),
    )


def _default_h_lc(field: PlanarVectorField) -> float:
    # H on the limit cycle is beta/2 for the p = k(beta - 2H) family
    if "beta" in field.params:
        return 0.5 * float(field.params["beta"])
    return 0.0


def _fill_level0_w(field, level0: LevelSet, neighbor: LevelSet, dH: float) -> None:
    """Estimate w on the limit cycle against the nearest traced level (p = 0).

    Candidates are oriented up-gradient (flipped when the neighbor lies
    outside the cycle), so the estimates carry the physical sign directly;
    with p = 0 the winner is the candidate most nearly perpendicular to
    the velocity.
    """
    ref = resample_closed_curve(neighbor.points, min(len(neighbor.points), DEFAULT_N_REFERENCE))
    inward_neighbor = neighbor.level_index < 0
    orient = 1.0 if inward_neighbor else -1.0  # candidates up-gradient (physical sign)
    n_pts = len(level0.points)
    ws = np.empty(n_pts)
    grads = np.empty((n_pts, 2))
    vels = np.empty((n_pts, 2))
    j_near = int(np.argmin(np.hypot(*(level0.points[0][None, :] - ref).T)))
    k_win = min(DEFAULT_K_WINDOW, len(ref))
    for i, pt in enumerate(level0.points):
        idx = _window_indices(len(ref), j_near, k_win)
        window = ref[idx]
        ds2 = (pt[0] - window[:, 0]) ** 2 + (pt[1] - window[:, 1]) ** 2
        j_near = int(idx[int(np.argmin(ds2))])
        vel_x, vel_y = field.rhs(pt[0], pt[1])
        sel, _ = _select_w(pt, vel_x, vel_y, window, 0.0, abs(dH), orient)
        if sel is not None:
            j_star = int(idx[sel[3]])
            sel, _ = _select_w(
                pt, vel_x, vel_y, _subdivided_reference(ref, j_star), 0.0, abs(dH), orient
            )
        if sel is None:  # cannot happen for p = 0, kept for symmetry
            ws[i] = np.nan
            grads[i] = (np.nan, np.nan)
        else:
            ws[i] = sel[0]
            grads[i] = sel[1]
        vels[i] = (vel_x, vel_y)
    level0.w_estimates = ws
    level0.grad_estimates = grads
    level0.velocities = vels


def propagate(
    field: PlanarVectorField,
    limit_cycle: LimitCycle,
    dP: float,
    dH: float,
    n_inward: int,
    n_outward: int,
    epsilon: float = DEFAULT_EPSILON,
    cycles: int = DEFAULT_CYCLES,
    n_reference: int = DEFAULT_N_REFERENCE,
    h_lc: Optional[float] = None,
    k_window: int = DEFAULT_K_WINDOW,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> LevelSetRun:
    """Propagate level sets from the limit cycle: level l has p = l*dP, H = H_LC + l*dH.

    Each traced level is resampled to n_reference points before serving as
    the next reference.  Inward propagation stops early when the contour
    diameter falls below 10*epsilon; a no-valid-w abort returns the levels
    completed so far with the abort recorded.
    """
    if dP <= 0 or dH <= 0:
        raise ValueError("dP and dH must be positive")
    if n_inward < 0 or n_outward < 0:
        raise ValueError("n_inward and n_outward must be >= 0")
    if h_lc is None:
        h_lc = _default_h_lc(field)

    cycle_ref = resample_closed_curve(limit_cycle.points, n_reference)
    level0 = LevelSet(
        level_index=0,
        p_level=0.0,
        h_assigned=h_lc,
        points=cycle_ref,
        w_estimates=np.full(n_reference, np.nan),
        closure_error=0.0,
    )
    levels = {0: level0}
    aborted = None
    notes = []
    level0_filled = False

    for direction, count in ((-1, n_inward), (+1, n_outward)):
        ref = cycle_ref
        seed_scale = None
        for step_no in range(1, count + 1):
            li = direction * step_no
            try:
                lv = trace_level(
                    field,
                    ref,
                    p_level=li * dP,
                    dH=direction * dH,
                    epsilon=epsilon,
                    cycles=cycles,
                    k_window=k_window,
                    seed_gradient_scale=seed_scale,
                    level_index=li,
                    h_assigned=h_lc + li * dH,
                    max_steps=max_steps,
                )
            except (AbortedTraceError, StagnationError) as exc:
                if aborted is None:
                    aborted = {"level_index": li, "reason": str(exc)}
                break
            levels[li] = lv
            if not level0_filled:
                _fill_level0_w(field, level0, lv, dH)
                level0_filled = True
            ref = resample_closed_curve(lv.points, n_reference)
            seed_scale = float(np.mean(np.hypot(lv.grad_estimates[:, 0], lv.grad_estimates[:, 1])))
            if direction < 0:
                diam = float(np.hypot(*(ref.max(axis=0) - ref.min(axis=0))))
                if diam < 10.0 * epsilon:
                    notes.append(
                        f"inward propagation stopped at level {li}: contour diameter "
                        f"{diam:.2e} < 10*epsilon (fixed-point neighborhood)"
                    )
                    break

    config = {
        "dP": dP,
        "dH": dH,
        "epsilon": epsilon,
        "cycles": cycles,
        "n_reference": n_reference,
        "n_inward": n_inward,
        "n_outward": n_outward,
        "h_lc": h_lc,
        "k_window": k_window,
    }
    ordered = [levels[i] for i in sorted(levels)]
    h_values = [lv.h_assigned for lv in ordered]
    if any(b <= a for a, b in zip(h_values, h_values[1:])):
        raise ValueError("h_assigned not strictly monotone in level_index")
    return LevelSetRun(
        config=config, levels=ordered, h_limit_cycle=h_lc, aborted=aborted, notes=notes
    )


def level_error(level: LevelSet, analytic_H) -> tuple:
    """(mean, std, max_abs_dev) of analytic H over the level's points.

    max_abs_dev measures deviation from h_assigned.
    """
    h = np.array([analytic_H(px, py) for px, py in level.points])
    return (
        float(h.mean()),
        float(h.std()),
        float(np.abs(h - level.h_assigned).max()),
    )


def orthogonality_residuals(level: LevelSet) -> np.ndarray:
    """|grad^T (xdot - p_phys grad)| / (|grad| |xdot|) per stored point."""
    g = level.grad_estimates
    v = level.velocities
    p_phys = -level.p_level
    num = np.abs(np.einsum("ij,ij->i", g, v - p_phys * g))
    den = np.linalg.norm(g, axis=1) * np.linalg.norm(v, axis=1)
    return num / den


def reconstruction_errors(level: LevelSet) -> np.ndarray:
    """Relative error of apply_kappa((-p_level, w), grad) against the velocity."""
    g = level.grad_estimates
    v = level.velocities
    p_phys = -level.p_level
    w = level.w_estimates
    rec = np.column_stack([p_phys * g[:, 0] - w * g[:, 1], p_phys * g[:, 1] + w * g[:, 0]])
    return np.linalg.norm(rec - v, axis=1) / np.linalg.norm(v, axis=1)


def level_winding(level: LevelSet) -> int:
    return winding_number(level.points)
