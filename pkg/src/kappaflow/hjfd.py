"""Finite-difference reference solvers for the radial Hamilton-Jacobi equation.

The radial equation rdot * dH/dr = p(H) * (dH/dr)^2 with linear
p(H) = p0 - q*H becomes, after a backward difference in r and removal of
the trivial root, a quadratic recurrence per node:

    -q H_n^2 + (p0 + q H_{n-1}) H_n - (rdot*dr + p0 H_{n-1}) = 0.

rdot is sampled at the step midpoint r_n - dr/2 (the recurrence itself does
not fix the sampling point; midpoint keeps the branch error well below the
first-order node-sampling error without changing the scheme's order).
The recurrence loses real roots as p(H) -> 0 near the limit cycle; the
first failing node terminates the solution.  That is a recorded outcome,
not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BranchDomainError, InvalidParameterError
from .fields import PlanarVectorField


@dataclass(frozen=True)
class PLinear:
    """Linear dissipative profile p(H) = p0 - q*H; p crosses zero at H = p0/q."""

    p0: float
    q: float

    def __call__(self, h: float) -> float:
        return self.p0 - self.q * h


@dataclass(frozen=True)
class HjRadialSolution:
    r_grid: np.ndarray       # increasing from 0, step dr
    h_values: np.ndarray     # chosen branch
    roots: np.ndarray        # (n, 2) lower/upper real roots, NaN before node 1
    r_terminate: Optional[float]  # first radius with no real roots, None if completed

    def __len__(self):
        return len(self.r_grid)


def _node_roots(h_prev: float, c: float, p0: float, q: float):
    """Real roots of -q H^2 + (p0 + q h_prev) H - c = 0, or None."""
    b = p0 + q * h_prev
    disc = b * b - 4.0 * q * c
    if disc < 0.0:
        return None
    s = np.sqrt(disc)
    return (b - s) / (2.0 * q), (b + s) / (2.0 * q)


def solve_radial(
    rdot: Callable[[float], float],
    p: PLinear,
    dr: float,
    r_max: float,
) -> HjRadialSolution:
    """March the quadratic recurrence outward from H(0) = 0.

    Both roots are recorded per node; the chosen branch is the root closer
    to the slope continuation H_{n-1} + (dH/dr)_{n-1} * dr (the lower root
    while below p0 / 2q).
    """
    if dr <= 0:
        raise InvalidParameterError(f"dr must be positive, got {dr}")
    if p.q == 0.0:
        raise InvalidParameterError("q must be nonzero (use recover_potential for p == 1)")
    n = int(round(r_max / dr))
    r = np.arange(n + 1) * dr
    h = np.zeros(n + 1)
    roots = np.full((n + 1, 2), np.nan)
    slope = 0.0
    for i in range(1, n + 1):
        c = rdot(r[i] - 0.5 * dr) * dr + p.p0 * h[i - 1]
        pair = _node_roots(h[i - 1], c, p.p0, p.q)
        if pair is None:
            return HjRadialSolution(r[:i], h[:i], roots[:i], float(r[i]))
        roots[i] = pair
        h_cont = h[i - 1] + slope * dr
        h[i] = pair[0] if abs(pair[0] - h_cont) <= abs(pair[1] - h_cont) else pair[1]
        slope = (h[i] - h[i - 1]) / dr
    return HjRadialSolution(r, h, roots, None)


@dataclass(frozen=True)
class PolarGridSpec:
    dr: float
    r_max: float
    n_theta: int = 128


@dataclass(frozen=True)
class Hj2dSolution:
    r_grid: np.ndarray       # (n_r,)
    theta_grid: np.ndarray   # (n_theta,)
    h_values: np.ndarray     # (n_r, n_theta)
    valid: np.ndarray        # (n_r, n_theta) bool


N_CORRECTOR = 3  # fixed angular-coupling corrector passes per node


def solve_forward_2d(field: PlanarVectorField, p: PLinear, grid: PolarGridSpec) -> Hj2dSolution:
    """Naive forward marching of the full polar equation, ray by ray.

    rdot dH/dr + thetadot/r dH/dtheta = p(H) [(dH/dr)^2 + (dH/dtheta)^2/r^2]

    Per node the angular terms (upwind in theta by the sign of thetadot,
    data from the previous ring) are folded into an effective radial slope
    rdot_eff = rdot + (A - p B)/D, reducing the update to the radial
    quadratic recurrence; D starts from the pure-radial predictor and is
    correction-iterated a fixed number of times.  Nodes lose validity when
    the recurrence has no real roots, |H| blows past 10 * p0/q, or the
    upwind neighbor is already invalid; invalidity propagates outward along
    each ray.  A radially symmetric field reproduces solve_radial exactly
    on every ray (the angular terms vanish and the node update is the same
    arithmetic).
    """
    if grid.dr <= 0 or grid.r_max <= 0 or grid.n_theta < 4:
        raise InvalidParameterError("grid needs dr > 0, r_max > 0, n_theta >= 4")
    if p.q == 0.0:
        raise InvalidParameterError("q must be nonzero")
    n_r = int(round(grid.r_max / grid.dr))
    theta = np.linspace(0.0, 2.0 * np.pi, grid.n_theta, endpoint=False)
    dth = theta[1] - theta[0]
    r = np.arange(n_r + 1) * grid.dr
    H = np.zeros((n_r + 1, grid.n_theta))
    valid = np.ones((n_r + 1, grid.n_theta), dtype=bool)
    blowup = 10.0 * p.p0 / p.q
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    for i in range(1, n_r + 1):
        rm = r[i] - 0.5 * grid.dr
        h_prev = H[i - 1]
        dh_fwd = (np.roll(h_prev, -1) - h_prev) / dth
        dh_bwd = (h_prev - np.roll(h_prev, 1)) / dth
        for m in range(grid.n_theta):
            if not valid[i - 1, m]:
                valid[i, m] = False
                continue
            x, y = rm * cos_t[m], rm * sin_t[m]
            vx, vy = field.rhs(x, y)
            rdot = (x * vx + y * vy) / rm
            thetadot = (x * vy - y * vx) / (rm * rm)
            # pure-radial predictor
            c = rdot * grid.dr + p.p0 * h_prev[m]
            pair = _node_roots(h_prev[m], c, p.p0, p.q)
            if pair is None:
                valid[i, m] = False
                continue
            h_new = pair[0] if abs(pair[0] - h_prev[m]) <= abs(pair[1] - h_prev[m]) else pair[1]
            m_up = (m - 1) % grid.n_theta if thetadot > 0 else (m + 1) % grid.n_theta
            dh_th = dh_bwd[m] if thetadot > 0 else dh_fwd[m]
            if i >= 2 and dh_th != 0.0:
                if not valid[i - 1, m_up]:
                    # upwind angular data unavailable: no honest update
                    valid[i, m] = False
                    continue
                a_theta = thetadot / rm * dh_th
                b_theta = (dh_th / rm) ** 2
                src = a_theta - p(h_prev[m]) * b_theta
                ok = True
                for _ in range(N_CORRECTOR):
                    slope = (h_new - h_prev[m]) / grid.dr
                    if slope == 0.0:
                        break
                    c = (rdot + src / slope) * grid.dr + p.p0 * h_prev[m]
                    pair = _node_roots(h_prev[m], c, p.p0, p.q)
                    if pair is None:
                        ok = False
                        break
                    h_cont = h_prev[m] + slope * grid.dr
                    h_new = pair[0] if abs(pair[0] - h_cont) <= abs(pair[1] - h_cont) else pair[1]
                if not ok:
                    valid[i, m] = False
                    continue
            if abs(h_new) > blowup:
                valid[i, m] = False
                continue
            H[i, m] = h_new
    return Hj2dSolution(r, theta, H, valid)


def recover_potential(
    rdot: Callable[[float], float],
    dr: float,
    r_max: float,
    beta: float,
) -> tuple:
    """Recover psi (p == 1 degenerates the scheme to forward Euler) and H.

    With attraction strength 1 the radially symmetric potential satisfies
    psi = H(beta - H); H is recovered as (beta -/+ sqrt(beta^2 - 4 psi))/2,
    minus branch inside the limit cycle, plus branch outside, switching at
    the psi maximum.  The integrated psi may overshoot the vertex value
    beta^2/4 by the scheme's own O(dr^2) error near the maximum, so the
    branch-domain guard allows max(1e-9, beta*dr) of overshoot.

    Returns (r_grid, psi, h_recovered).
    """
    if dr <= 0:
        raise InvalidParameterError(f"dr must be positive, got {dr}")
    n = int(round(r_max / dr))
    r = np.arange(n + 1) * dr
    psi = np.zeros(n + 1)
    for i in range(1, n + 1):
        psi[i] = psi[i - 1] + rdot(r[i] - 0.5 * dr) * dr
    disc = beta * beta - 4.0 * psi
    guard = max(1e-9, beta * dr)
    if disc.min() < -guard:
        raise BranchDomainError(
            f"beta^2 - 4 psi reaches {disc.min():.3e} < -{guard:.3e}; "
            "psi is inconsistent with this beta"
        )
    disc = np.clip(disc, 0.0, None)
    i_max = int(np.argmax(psi))
    root = np.sqrt(disc)
    h = np.where(np.arange(n + 1) <= i_max, 0.5 * (beta - root), 0.5 * (beta + root))
    return r, psi, h


def radial_speed(field: PlanarVectorField, theta: float = 0.0) -> Callable[[float], float]:
    """rdot(r) along the ray at angle theta, from the field."""
    c, s = np.cos(theta), np.sin(theta)

    def rdot(r: float) -> float:
        if r == 0.0:
            return 0.0
        vx, vy = field.rhs(r * c, r * s)
        return float(c * vx + s * vy)

    return rdot


def linear_slope_rdot(p: PLinear, dr: float) -> Callable[[float], float]:
    """Demonstration input: node n receives rdot*dr = dr*(p0 - q*r_n) exactly.

    Under this input the chosen branch is H(r) = r and the first node's
    roots are {dr, p0/q - dr}.
    """

    def rdot(r: float) -> float:
        return p.p0 - p.q * (r + 0.5 * dr)

    return rdot
