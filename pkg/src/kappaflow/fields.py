"""Planar vector fields: model catalog, differential operators, complex embedding.

The central object is the decomposition xdot = kappa * grad(H) with
kappa = [[p, -w], [w, p]]: p scales motion across the contours of the
generalized Hamiltonian H (dissipative part), w scales motion along them
(rotational part).  All catalog models have their single unstable fixed
point at the origin and a stable limit cycle around it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidParameterError, NumericalDomainError, ShapeError

FD_STEP = 1e-5  # central-difference step for Jacobians of O(1) fields

MODEL_NAMES = ("symm", "symm_rad", "symm_phase", "asymm", "vdp", "vdp_yuan")


@dataclass(frozen=True)
class KappaForm:
    """The (p, w) pair acting as the normal matrix [[p, -w], [w, p]]."""

    p: float
    w: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.p, -self.w], [self.w, self.p]])

    def det(self) -> float:
        return self.p * self.p + self.w * self.w

    def inverse(self) -> "KappaForm":
        d = self.det()
        if d == 0.0:
            raise ShapeError("kappa with p = w = 0 has no inverse")
        return KappaForm(self.p / d, -self.w / d)


@dataclass(frozen=True)
class PlanarVectorField:
    """Evaluatable planar ODE right-hand side with fixed point at the origin."""

    name: str
    rhs: Callable[[float, float], tuple]
    analytic_jacobian: Optional[Callable[[float, float], np.ndarray]] = None
    params: dict = field(default_factory=dict)
    fixed_point: tuple = (0.0, 0.0)

    def __call__(self, x: float, y: float):
        return self.rhs(x, y)

    def without_analytic_jacobian(self) -> "PlanarVectorField":
        """Copy forcing finite-difference Jacobians (for cross-checks)."""
        return PlanarVectorField(self.name, self.rhs, None, dict(self.params))


@dataclass(frozen=True)
class ModelGeometry:
    """Analytic H, its derivatives, and kappa(x, y) for models that have them."""

    H: Callable[[float, float], float]
    grad_H: Callable[[float, float], np.ndarray]
    hess_H: Callable[[float, float], np.ndarray]
    kappa: Callable[[float, float], KappaForm]


@dataclass(frozen=True)
class ModelSpec:
    """Catalog model selector: one of the six built-in names plus parameters.

    Applicable parameters (others rejected):
      symm        beta, k, omega, lam     (beta > 0, lam^2 < 1)
      symm_rad    beta, k, omega          (beta > 0)
      symm_phase  beta, k, omega, lam     (beta > 0, lam^2 < 1)
      asymm       beta, k, omega, a, mu   (mu^2 > a^2)
      vdp         mu                      (mu > 0)
      vdp_yuan    mu                      (mu > 0)
    """

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in MODEL_NAMES:
            raise InvalidParameterError(
                f"unknown model {self.name!r}; valid: {', '.join(MODEL_NAMES)}"
            )
        allowed = _ALLOWED_PARAMS[self.name]
        extra = set(self.params) - set(allowed)
        if extra:
            raise InvalidParameterError(
                f"model {self.name!r} does not take parameters {sorted(extra)}; "
                f"allowed: {sorted(allowed)}"
            )
        merged = dict(_DEFAULT_PARAMS[self.name])
        merged.update(self.params)
        missing = [k for k, v in merged.items() if v is None]
        if missing:
            raise InvalidParameterError(
                f"model {self.name!r} requires parameters {missing}"
            )
        object.__setattr__(self, "params", merged)
        _validate_constraints(self.name, merged)


_ALLOWED_PARAMS = {
    "symm": ("beta", "k", "omega", "lam"),
    "symm_rad": ("beta", "k", "omega"),
    "symm_phase": ("beta", "k", "omega", "lam"),
    "asymm": ("beta", "k", "omega", "a", "mu"),
    "vdp": ("mu",),
    "vdp_yuan": ("mu",),
}

# None marks a required parameter without a default.
_DEFAULT_PARAMS = {
    "symm": {"beta": 10.0, "k": 1.0, "omega": -1.0, "lam": 0.0},
    "symm_rad": {"beta": 10.0, "k": 1.0, "omega": -1.0},
    "symm_phase": {"beta": 10.0, "k": 1.0, "omega": -1.0, "lam": 0.5},
    "asymm": {"beta": 10.0, "k": 0.01, "omega": -math.pi / 10, "a": 1.5, "mu": 2.0},
    "vdp": {"mu": 1.0},
    "vdp_yuan": {"mu": 1.0},
}


def _validate_constraints(name: str, p: dict) -> None:
    if name in ("symm", "symm_rad", "symm_phase"):
        if not p["beta"] > 0:
            raise InvalidParameterError(f"{name}: beta > 0 required, got beta={p['beta']}")
    if name in ("symm", "symm_phase"):
        if not p["lam"] ** 2 < 1:
            raise InvalidParameterError(f"{name}: lam^2 < 1 required, got lam={p['lam']}")
    if name == "asymm":
        if not p["mu"] ** 2 > p["a"] ** 2:
            raise InvalidParameterError(
                f"asymm: mu^2 > a^2 required for a single extremum of H, "
                f"got mu^2={p['mu'] ** 2} <= a^2={p['a'] ** 2}"
            )
    if name in ("vdp", "vdp_yuan"):
        if not p["mu"] > 0:
            raise InvalidParameterError(f"{name}: mu > 0 required, got mu={p['mu']}")


def make_model(spec: ModelSpec) -> PlanarVectorField:
    """Build a catalog model with its analytic Jacobian."""
    p = spec.params
    if spec.name in ("symm", "symm_rad", "symm_phase"):
        beta, k, omega = p["beta"], p["k"], p["omega"]
        lam = p.get("lam", 0.0)

        def rhs(x, y, beta=beta, k=k, omega=omega, lam=lam):
            u = beta - x * x - y * y
            w = omega * (1.0 - lam * x)
            return (k * x * u - w * y, k * y * u + w * x)

        def jac(x, y, beta=beta, k=k, omega=omega, lam=lam):
            u = beta - x * x - y * y
            return np.array(
                [
                    [k * (u - 2 * x * x) + omega * lam * y, -2 * k * x * y - omega * (1 - lam * x)],
                    [-2 * k * x * y + omega * (1 - 2 * lam * x), k * (u - 2 * y * y)],
                ]
            )

        return PlanarVectorField(spec.name, rhs, jac, dict(p))

    if spec.name == "asymm":
        beta, k, omega, a, mu = p["beta"], p["k"], p["omega"], p["a"], p["mu"]
        mu2 = mu * mu

        def H(x, y, mu2=mu2, a=a):
            return 0.5 * mu2 * (x * x + y * y) - a / 3.0 * x**3 + 0.25 * x**4

        def rhs(x, y, beta=beta, k=k, omega=omega, a=a, mu2=mu2):
            gx = mu2 * x - a * x * x + x**3
            gy = mu2 * y
            pp = k * (beta - 2.0 * H(x, y))
            return (pp * gx - omega * gy, omega * gx + pp * gy)

        def jac(x, y, beta=beta, k=k, omega=omega, a=a, mu2=mu2):
            gx = mu2 * x - a * x * x + x**3
            gy = mu2 * y
            hxx = mu2 - 2 * a * x + 3 * x * x
            pp = k * (beta - 2.0 * H(x, y))
            # J = kappa * hess(H) + C(grad H) * D(sigma), with dp = -2k grad(H), dw = 0
            return np.array(
                [
                    [pp * hxx - 2 * k * gx * gx, -omega * mu2 - 2 * k * gy * gx],
                    [omega * hxx - 2 * k * gx * gy, pp * mu2 - 2 * k * gy * gy],
                ]
            )

        return PlanarVectorField(spec.name, rhs, jac, dict(p))

    # vdp / vdp_yuan
    mu = p["mu"]
    yuan = spec.name == "vdp_yuan"

    def h_forcing(x, mu=mu, yuan=yuan):
        if not yuan:
            return 0.0
        return mu * mu / 4.0 * x**3 - mu * mu / 16.0 * x**5

    def dh_forcing(x, mu=mu, yuan=yuan):
        if not yuan:
            return 0.0
        return 3.0 * mu * mu / 4.0 * x * x - 5.0 * mu * mu / 16.0 * x**4

    def rhs(x, y, mu=mu):
        return (y, mu * (1.0 - x * x) * y - x + h_forcing(x))

    def jac(x, y, mu=mu):
        return np.array([[0.0, 1.0], [-2.0 * mu * x * y - 1.0 + dh_forcing(x), mu * (1.0 - x * x)]])

    return PlanarVectorField(spec.name, rhs, jac, dict(p))


def model_geometry(spec: ModelSpec) -> ModelGeometry:
    """Analytic (H, grad H, hess H, kappa) for symm/symm_rad/symm_phase/asymm."""
    p = spec.params
    if spec.name in ("symm", "symm_rad", "symm_phase"):
        beta, k, omega = p["beta"], p["k"], p["omega"]
        lam = p.get("lam", 0.0)
        return ModelGeometry(
            H=lambda x, y: 0.5 * (x * x + y * y),
            grad_H=lambda x, y: np.array([x, y]),
            hess_H=lambda x, y: np.eye(2),
            kappa=lambda x, y: KappaForm(
                k * (beta - x * x - y * y), omega * (1.0 - lam * x)
            ),
        )
    if spec.name == "asymm":
        beta, k, omega, a, mu = p["beta"], p["k"], p["omega"], p["a"], p["mu"]
        mu2 = mu * mu

        def H(x, y):
            return 0.5 * mu2 * (x * x + y * y) - a / 3.0 * x**3 + 0.25 * x**4

        return ModelGeometry(
            H=H,
            grad_H=lambda x, y: np.array([mu2 * x - a * x * x + x**3, mu2 * y]),
            hess_H=lambda x, y: np.array([[mu2 - 2 * a * x + 3 * x * x, 0.0], [0.0, mu2]]),
            kappa=lambda x, y: KappaForm(k * (beta - 2.0 * H(x, y)), omega),
        )
    raise InvalidParameterError(f"model {spec.name!r} has no closed-form generalized Hamiltonian")


# ---------------------------------------------------------------------------
# differential operators
# ---------------------------------------------------------------------------

def jacobian(field: PlanarVectorField, point, h_fd: float = FD_STEP) -> np.ndarray:
    """2x2 Jacobian [[dxdot/dx, dxdot/dy], [dydot/dx, dydot/dy]] at `point`.

    Uses the analytic Jacobian when the field carries one, otherwise central
    finite differences with step `h_fd`.
    """
    x, y = float(point[0]), float(point[1])
    if field.analytic_jacobian is not None:
        J = np.asarray(field.analytic_jacobian(x, y), dtype=float)
        if not np.all(np.isfinite(J)):
            raise NumericalDomainError(f"non-finite Jacobian at ({x}, {y})")
        return J
    fxp = np.asarray(field.rhs(x + h_fd, y), dtype=float)
    fxm = np.asarray(field.rhs(x - h_fd, y), dtype=float)
    fyp = np.asarray(field.rhs(x, y + h_fd), dtype=float)
    fym = np.asarray(field.rhs(x, y - h_fd), dtype=float)
    stencil = np.concatenate([fxp, fxm, fyp, fym])
    if not np.all(np.isfinite(stencil)):
        raise NumericalDomainError(f"non-finite rhs in FD stencil around ({x}, {y})")
    dx = (fxp - fxm) / (2.0 * h_fd)
    dy = (fyp - fym) / (2.0 * h_fd)
    return np.array([[dx[0], dy[0]], [dx[1], dy[1]]])


def divergence(field: PlanarVectorField, point) -> float:
    J = jacobian(field, point)
    return float(J[0, 0] + J[1, 1])


def curl(field: PlanarVectorField, point) -> float:
    """Two-dimensional scalar curl d(ydot)/dx - d(xdot)/dy."""
    J = jacobian(field, point)
    return float(J[1, 0] - J[0, 1])


def grad_fd(f: Callable[[float, float], float], x: float, y: float, h: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    return np.array(
        [
            (f(x + h, y) - f(x - h, y)) / (2 * h),
            (f(x, y + h) - f(x, y - h)) / (2 * h),
        ]
    )


def laplacian_fd(f: Callable[[float, float], float], x: float, y: float, h: float = 1e-4) -> float:
    """Five-point Laplacian of a scalar function."""
    return (
        f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)
    ) / (h * h)


def div_fd(v: Callable[[float, float], np.ndarray], x: float, y: float, h: float = 1e-4) -> float:
    return float(
        (v(x + h, y)[0] - v(x - h, y)[0]) / (2 * h)
        + (v(x, y + h)[1] - v(x, y - h)[1]) / (2 * h)
    )


def curl_fd(v: Callable[[float, float], np.ndarray], x: float, y: float, h: float = 1e-4) -> float:
    return float(
        (v(x + h, y)[1] - v(x - h, y)[1]) / (2 * h)
        - (v(x, y + h)[0] - v(x, y - h)[0]) / (2 * h)
    )


# ---------------------------------------------------------------------------
# complex embedding
# ---------------------------------------------------------------------------

def embed_c(v) -> np.ndarray:
    """Embed the vector (a, b) as the normal matrix [[a, -b], [b, a]].

    This is the representation of a + ib in the ring of real 2x2 matrices;
    matrix products of embedded vectors realize complex multiplication.
    """
    a, b = float(v[0]), float(v[1])
    return np.array([[a, -b], [b, a]])


def unembed_c(M) -> np.ndarray:
    """Inverse of embed_c; rejects matrices not of normal form [[a, -b], [b, a]]."""
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 matrix, got shape {M.shape}")
    tol = 1e-9 * max(1.0, float(np.abs(M).max()))
    if abs(M[0, 0] - M[1, 1]) > tol or abs(M[0, 1] + M[1, 0]) > tol:
        raise ShapeError("matrix is not of the normal form [[a, -b], [b, a]]")
    return np.array([M[0, 0], M[1, 0]])


def apply_kappa(kappa: KappaForm, gradient) -> np.ndarray:
    """kappa acting on a gradient: (p*gx - w*gy, p*gy + w*gx)."""
    gx, gy = float(gradient[0]), float(gradient[1])
    return np.array([kappa.p * gx - kappa.w * gy, kappa.p * gy + kappa.w * gx])
