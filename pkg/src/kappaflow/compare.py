"""Comparison against the SA-SDE potential on the generalized van der Pol system.

The SA-SDE construction assigns the system xdot = (y, mu(1-x^2)y - x + h)
with h = mu^2/4 x^3 - mu^2/16 x^5 the potential

    psi = s/2 * (s/2 - 4),   s = u^2 + v^2,  u = x,  v = y - mu x + mu/4 x^3.

psi has its minimum ring on {u^2 + v^2 = 4}, which is exactly the system's
limit cycle; the gradient vanishes there, so the per-point (p, w) read off
from xdot = C(grad psi) * sigma becomes singular on the cycle while the
level-set decomposition keeps p = 0, w bounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .errors import ShapeError
from .fields import PlanarVectorField
from .flow import hausdorff_distance  # noqa: F401  (re-exported for curve comparisons)
from .levelset import LevelSet

SINGULAR_GRAD_TOL = 1e-8


@dataclass(frozen=True)
class SasdePotential:
    """Closed-form SA-SDE potential for the generalized van der Pol oscillator."""

    mu: float

    def uv(self, x, y):
        u = x
        v = y - self.mu * x + 0.25 * self.mu * x**3
        return u, v

    def psi(self, x, y):
        u, v = self.uv(x, y)
        s = u * u + v * v
        return 0.5 * s * (0.5 * s - 4.0)

    def grad(self, x, y) -> np.ndarray:
        u, v = self.uv(x, y)
        s = u * u + v * v
        return (s - 4.0) * np.array([u + self.mu * v * (0.75 * x * x - 1.0), v])


def sasde_psi(mu: float, point) -> float:
    return float(SasdePotential(mu).psi(point[0], point[1]))


def sasde_grad(mu: float, point) -> np.ndarray:
    return SasdePotential(mu).grad(point[0], point[1])


def zero_gradient_curve(mu: float, n: int = 2048) -> np.ndarray:
    """The curve {grad psi = 0} = {u^2 + v^2 = 4}, mapped back to (x, y).

    Exact parametrization: u = 2 cos(t), v = 2 sin(t), x = u,
    y = v + mu*u - mu/4 u^3.  This curve is invariant under the vdp_yuan
    flow (it is the limit cycle).
    """
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    u = 2.0 * np.cos(t)
    v = 2.0 * np.sin(t)
    x = u
    y = v + mu * u - 0.25 * mu * u**3
    return np.column_stack([x, y])


def trace_psi_contour(
    potential: SasdePotential,
    level: float,
    epsilon: float = 1e-3,
    r_bracket: tuple = (1e-3, 10.0),
    max_steps: int = 10_000_000,
) -> np.ndarray:
    """Trace {psi = level} by forward Euler along the rotated gradient.

    The seed is located by root-finding psi = level along the +x ray.  The
    same pseudo-complement idea as the level-set tracer, with kappa = (1, 0):
    the step direction is R_perp * grad(psi) normalized.
    """
    f = lambda r: potential.psi(r, 0.0) - level
    lo, hi = r_bracket
    if f(lo) * f(hi) > 0:
        raise ShapeError(f"psi = {level} has no crossing on the +x ray in {r_bracket}")
    r0 = brentq(f, lo, hi)
    x = np.array([r0, 0.0])
    pts = [x.copy()]
    winding = 0.0
    phi_prev = 0.0
    for _ in range(max_steps):
        g = potential.grad(x[0], x[1])
        norm = np.hypot(g[0], g[1])
        if norm < SINGULAR_GRAD_TOL:
            raise ShapeError("gradient vanished while tracing the psi contour")
        step = np.array([-g[1], g[0]]) / norm
        x = x + epsilon * step
        phi = np.arctan2(x[1], x[0])
        winding += (phi - phi_prev + np.pi) % (2.0 * np.pi) - np.pi
        phi_prev = phi
        pts.append(x.copy())
        if abs(winding) >= 2.0 * np.pi:
            return np.array(pts)
    raise ShapeError("psi contour trace did not close")


@dataclass(frozen=True)
class CurveComponents:
    """Per-point (p, w) along a curve, with singular-gradient flags."""

    p: np.ndarray
    w: np.ndarray
    singular: np.ndarray  # bool; True where |grad| < tolerance and (p, w) is unreliable
    method: str


GradientSource = Union[SasdePotential, LevelSet, Callable[[float, float], np.ndarray]]


def components_along_curve(
    field: PlanarVectorField,
    curve,
    gradient_source: GradientSource,
) -> CurveComponents:
    """Solve sigma = C(grad)^-1 xdot per point, or read the level-set pair.

    For a LevelSet source the stored physical pair (-p_level, w_estimates)
    is returned (`curve` may be None; the level's own points are used).
    For an analytic source, points where |grad| < 1e-8 are flagged singular
    and carry NaN components (the SA-SDE potential on its own limit cycle).
    """
    if isinstance(gradient_source, LevelSet):
        lv = gradient_source
        n = len(lv.points)
        if curve is not None and len(np.asarray(curve)) != n:
            raise ShapeError("curve and LevelSet points disagree in length")
        p = np.full(n, -lv.p_level)
        return CurveComponents(p, np.array(lv.w_estimates), np.zeros(n, dtype=bool), "levelset")

    grad_fn = gradient_source.grad if isinstance(gradient_source, SasdePotential) else gradient_source
    pts = np.asarray(curve, dtype=float)
    n = len(pts)
    p = np.empty(n)
    w = np.empty(n)
    singular = np.zeros(n, dtype=bool)
    for i, (x, y) in enumerate(pts):
        g = np.asarray(grad_fn(x, y), dtype=float)
        g2 = g @ g
        if g2 < SINGULAR_GRAD_TOL**2:
            singular[i] = True
            p[i] = w[i] = np.nan
            continue
        vx, vy = field.rhs(x, y)
        # sigma = C(grad)^-1 xdot  (complex division by gx + i gy)
        p[i] = (g[0] * vx + g[1] * vy) / g2
        w[i] = (g[0] * vy - g[1] * vx) / g2
    method = "sasde" if isinstance(gradient_source, SasdePotential) else "callable"
    return CurveComponents(p, w, singular, method)


def _stats(a: np.ndarray) -> dict:
    ok = a[np.isfinite(a)]
    if len(ok) == 0:
        return {"mean": float("nan"), "variance": float("nan"), "min": float("nan"), "max": float("nan")}
    return {
        "mean": float(ok.mean()),
        "variance": float(ok.var()),
        "min": float(ok.min()),
        "max": float(ok.max()),
    }


def variance_report(
    components_a: CurveComponents,
    components_b: CurveComponents,
    csv_path: Optional[str] = None,
    curve=None,
    header_lines=(),
) -> dict:
    """Mean/variance/min/max of p and w per method, plus an optional paired CSV."""
    if len(components_a.p) != len(components_b.p):
        raise ShapeError("component lists must be sampled on the same curve")
    report = {
        components_a.method: {"p": _stats(components_a.p), "w": _stats(components_a.w)},
        components_b.method: {"p": _stats(components_b.p), "w": _stats(components_b.w)},
    }
    if csv_path is not None:
        from .output import write_csv

        pts = np.asarray(curve, dtype=float) if curve is not None else None
        seg = (
            np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
            if pts is not None
            else np.arange(len(components_a.p), dtype=float)
        )
        rows = []
        for i in range(len(components_a.p)):
            x, y = (pts[i] if pts is not None else (np.nan, np.nan))
            rows.append(
                (seg[i], x, y, components_a.p[i], components_a.w[i], components_b.p[i], components_b.w[i])
            )
        write_csv(
            csv_path,
            header_lines,
            (
                "s_arclength",
                "x",
                "y",
                f"p_{components_a.method}",
                f"w_{components_a.method}",
                f"p_{components_b.method}",
                f"w_{components_b.method}",
            ),
            rows,
        )
    return report


def sasde_quadratic_coefficients(mu: float) -> tuple:
    """Quadratic-part coefficients (cxx, cyy, cxy) of psi about the origin.

    Direct expansion: psi ~ -2[(1 + mu^2) x^2 + y^2 - 2 mu x y] + O(|x|^3).
    """
    return (-2.0 * (1.0 + mu * mu), -2.0, 4.0 * mu)


def printed_h0_forms(mu: float) -> dict:
    """The two linearized-Hamiltonian forms printed for this system.

    Coefficient triples (cxx, cyy, cxy), not normalized:
      "R":  (1 + mu^2, 1, -2 mu)                      -- matches the psi expansion
      "SA": 2/(mu^2+4) * (2, 2 + mu^2, -2 mu)         -- matches x^T F0 x / 2 from
                                                         the divergence/curl kappa0
    The source labels these the other way around; both are reported and the
    fixed-point decomposition follows kappa0.
    """
    m2 = mu * mu
    return {
        "R": (1.0 + m2, 1.0, -2.0 * mu),
        "SA": (4.0 / (m2 + 4.0), 2.0 * (2.0 + m2) / (m2 + 4.0), -4.0 * mu / (m2 + 4.0)),
    }


def fit_quadratic_origin(f: Callable[[float, float], float], radius: float = 0.1, n: int = 400) -> tuple:
    """Least-squares (cxx, cyy, cxy, const) fit of f on a disc about the origin."""
    rng = np.random.default_rng(1234)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    x, y = r * np.cos(t), r * np.sin(t)
    A = np.column_stack([x * x, y * y, x * y, np.ones(n)])
    b = np.array([f(xi, yi) for xi, yi in zip(x, y)])
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    return tuple(coef)
