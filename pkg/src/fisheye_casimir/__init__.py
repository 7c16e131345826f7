"""Exact Casimir stress inside Maxwell's fish eye bounded by a perfect spherical mirror."""
from .errors import CoincidenceError, ConvergenceError, DomainError, StepSizeError, UnsupportedFunctionError
from .geometry import (
    MediumParams,
    image_point,
    inversion_jacobian,
    mobius_separation,
    on_axis_separation,
    refractive_index,
)
from .numerics import FDConfig, QuadratureConfig
from .scalar_green import (
    ScalarGreenPoint,
    d2D_dr2,
    dD_dr,
    integral_D_closed,
    integral_D_derivs,
    integral_D_quad,
    scalar_D,
)
from .em_green import (
    ReflectedDiagonal,
    green_free,
    green_reflected,
    green_total,
    magnetic_green_oracle,
    reflected_diagonal_on_axis,
)
from .stress import (
    casimir_stress,
    force_density,
    rescale,
    stress_from_tau,
    tau_regularized,
    tau_regularized_quadrature,
)

__version__ = "0.1.0"
