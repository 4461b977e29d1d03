"""kappaflow: geometric decomposition xdot = kappa * grad(H) of planar limit-cycle systems."""

__version__ = "0.1.0"

from .fields import (
    KappaForm,
    ModelSpec,
    PlanarVectorField,
    apply_kappa,
    curl,
    divergence,
    embed_c,
    jacobian,
    make_model,
    model_geometry,
    unembed_c,
)
from .flow import LimitCycle, Trajectory, find_limit_cycle, integrate, resample_closed_curve
from .hjfd import HjRadialSolution, PLinear, recover_potential, solve_forward_2d, solve_radial
from .levelset import (
    LevelSet,
    LevelSetRun,
    estimate_gradient_candidates,
    estimate_w,
    level_error,
    propagate,
    pseudo_complement,
    trace_level,
)
from .linearize import (
    LinearDecomposition,
    QuadraticForm,
    decompose_linear,
    jacobian_split,
    kappa0_at_origin,
)
from .compare import (
    SasdePotential,
    components_along_curve,
    sasde_grad,
    sasde_psi,
    variance_report,
    zero_gradient_curve,
)

__all__ = [
    "KappaForm",
    "ModelSpec",
    "PlanarVectorField",
    "apply_kappa",
    "curl",
    "divergence",
    "embed_c",
    "jacobian",
    "make_model",
    "model_geometry",
    "unembed_c",
    "LimitCycle",
    "Trajectory",
    "find_limit_cycle",
    "integrate",
    "resample_closed_curve",
    "HjRadialSolution",
    "PLinear",
    "recover_potential",
    "solve_forward_2d",
    "solve_radial",
    "LevelSet",
    "LevelSetRun",
    "estimate_gradient_candidates",
    "estimate_w",
    "level_error",
    "propagate",
    "pseudo_complement",
    "trace_level",
    "LinearDecomposition",
    "QuadraticForm",
    "decompose_linear",
    "jacobian_split",
    "kappa0_at_origin",
    "SasdePotential",
    "components_along_curve",
    "sasde_grad",
    "sasde_psi",
    "variance_report",
    "zero_gradient_curve",
]
