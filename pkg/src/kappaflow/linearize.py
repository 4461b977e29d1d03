"""Analytic decomposition at the fixed point: J0 = kappa0 * F0.

kappa0 is fixed by half the divergence and half the curl at the origin,
which makes F0 = kappa0^-1 * J0 unique with trace(F0) = 2 (unit mean
curvature of the induced quadratic level sets).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateDecompositionError, IdentityViolationError
from .fields import (
    KappaForm,
    ModelGeometry,
    PlanarVectorField,
    curl,
    divergence,
    embed_c,
    jacobian,
)

PSD_TOL = -1e-9          # admit marginal numerical indefiniteness
ASYMMETRY_WARN = 1e-6    # F0 asymmetry above this is reported, not fatal


@dataclass(frozen=True)
class QuadraticForm:
    """H0(x, y) = (A x^2 + B y^2 + 2 C x y) / 2."""

    A: float
    B: float
    C: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.A, self.C], [self.C, self.B]])

    def __call__(self, x: float, y: float) -> float:
        return 0.5 * (self.A * x * x + self.B * y * y + 2.0 * self.C * x * y)

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        return self.A >= tol and self.B >= tol and self.A * self.B - self.C**2 >= tol


@dataclass(frozen=True)
class LinearDecomposition:
    j0: np.ndarray
    kappa0: KappaForm
    f0: QuadraticForm
    eigenvalues: tuple  # complex pair of J0
    asymmetry: float = 0.0
    warning: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "j0": self.j0.tolist(),
            "p0": self.kappa0.p,
            "w0": self.kappa0.w,
            "f0": self.f0.matrix().tolist(),
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "h0_coeffs": {"A": self.f0.A, "B": self.f0.B, "C": self.f0.C},
        }


def kappa0_at_origin(field: PlanarVectorField) -> KappaForm:
    """kappa0 = (div/2, curl/2) evaluated at the fixed point."""
    p = 0.5 * divergence(field, (0.0, 0.0))
    w = 0.5 * curl(field, (0.0, 0.0))
    if p * p + w * w == 0.0:
        raise DegenerateDecompositionError(
            "divergence and curl both vanish at the origin; kappa0 is not invertible"
        )
    return KappaForm(p, w)


def decompose_linear(field: PlanarVectorField) -> LinearDecomposition:
    """Polar-like split J0 = kappa0 * F0 with eigenvalues of J0 attached.

    F0 is symmetrized by averaging its off-diagonal entries; the discarded
    asymmetry magnitude is reported (finite-difference Jacobians carry noise).
    """
    j0 = jacobian(field, (0.0, 0.0))
    kappa0 = kappa0_at_origin(field)
    kinv = kappa0.inverse()
    m = embed_c((kinv.p, kinv.w)) @ j0
    asym = float(abs(m[0, 1] - m[1, 0]))
    c = 0.5 * (m[0, 1] + m[1, 0])
    f0 = QuadraticForm(float(m[0, 0]), float(m[1, 1]), float(c))
    if not f0.is_psd():
        raise DegenerateDecompositionError(
            f"F0 = {f0.matrix().tolist()} is not positive semi-definite"
        )
    warning = None
    if asym > ASYMMETRY_WARN:
        warning = f"F0 asymmetry {asym:.3e} exceeds {ASYMMETRY_WARN:.0e}"
    eig = np.linalg.eigvals(j0)
    eig = tuple(sorted((complex(z) for z in eig), key=lambda z: z.imag))
    return LinearDecomposition(j0, kappa0, f0, eig, asym, warning)


def jacobian_split(
    field: PlanarVectorField,
    point,
    geometry: ModelGeometry,
    fd_step: float = 1e-5,
    identity_tol: float = 1e-6,
) -> tuple:
    """Split J into the geometry part J_H = kappa * hess(H) and J_kappa = J - J_H.

    J_kappa is cross-checked against Q * D(sigma), Q = embed_c(grad H), with
    D(sigma) obtained by central differences of the analytic kappa field.
    """
    x, y = float(point[0]), float(point[1])
    J = jacobian(field, point)
    kap = geometry.kappa(x, y)
    J_H = embed_c((kap.p, kap.w)) @ geometry.hess_H(x, y)
    J_kappa = J - J_H

    h = fd_step
    kxp, kxm = geometry.kappa(x + h, y), geometry.kappa(x - h, y)
    kyp, kym = geometry.kappa(x, y + h), geometry.kappa(x, y - h)
    d_sigma = np.array(
        [
            [(kxp.p - kxm.p) / (2 * h), (kyp.p - kym.p) / (2 * h)],
            [(kxp.w - kxm.w) / (2 * h), (kyp.w - kym.w) / (2 * h)],
        ]
    )
    Q = embed_c(geometry.grad_H(x, y))
    residual = float(np.abs(J - J_H - Q @ d_sigma).max())
    if residual > identity_tol:
        raise IdentityViolationError(
            f"|J - kappa*hess(H) - Q*D(sigma)| = {residual:.3e} > {identity_tol:.0e} at ({x}, {y})"
        )
    return J_H, J_kappa
