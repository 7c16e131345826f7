"""Regularised correlation tensor, Casimir stress, force density and unit scaling.

Reduced units (a = 1, n1 = 1, hbar*c = 1) are used internally; physical
values come from :func:`rescale`. The uniform background generated by the
free Green function carries no force and is dropped, so only the mirror
reflection contributes.
"""
from __future__ import annotations

import numpy as np

from .em_green import integrated_reflected_kernel, reflected_diagonal_on_axis
from .errors import DomainError
from .geometry import REDUCED, MediumParams, on_axis_separation, refractive_index
from .numerics import QuadratureConfig, integrate_semi_infinite
from .scalar_green import d2D_dr2, dD_dr, decay_rate


def _reduced_radius(r):
    r = float(r)
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius must satisfy 0 <= r/a < 1, got {r}")
    return r


def tau_regularized(r: float) -> np.ndarray:
    """tau - tau0 = (1 + r^2) / (pi^2 (1 - r^2)^4) * identity, reduced units.

    Same as (1 + r^2) / (16 pi^2 (r' r)^4) with r' = (1/r - r)/2, rewritten so
    the centre is regular.
    """
    r = _reduced_radius(r)
    return (1.0 + r * r) / (np.pi**2 * (1.0 - r * r) ** 4) * np.eye(3)


def tau_regularized_quadrature(r: float, quad: QuadratureConfig | None = None) -> np.ndarray:
    """tau - tau0 = -(2 n / pi) * integral of kappa^2 G_s,reflected, on the x axis.

    The kappa-integrals of the two distinct diagonal entries are computed
    numerically from the closed-form reflected tensor.
    """
    r = _reduced_radius(r)
    if r == 0.0:
        raise DomainError("the quadrature path needs r > 0 (image at infinity)")
    rp = float(on_axis_separation(r))
    weight = reflected_diagonal_on_axis(r, 1.0).prefactor   # kappa^2 * prefactor is kappa-free

    def integrand(ks):
        d = dD_dr(rp, ks)
        return np.stack([2.0 * d, -d - rp * d2D_dr2(rp, ks)], axis=-1)

    (i1, i2), _ = integrate_semi_infinite(integrand, float(decay_rate(rp)), quad)
    n = float(refractive_index(r))
    return -(2.0 * n / np.pi) * weight * np.diag([i1, i2, i2])


def tau_full_tensor(point, method: str = "closed", quad: QuadratureConfig | None = None) -> np.ndarray:
    """Regularised correlation tensor at an arbitrary point from the full 3x3 reflected Green function."""
    point = np.asarray(point, dtype=float)
    n = float(refractive_index(np.linalg.norm(point)))
    return -(2.0 * n / np.pi) * integrated_reflected_kernel(point, method, quad)


def stress_from_tau(tau) -> np.ndarray:
    """sigma = tau - (1/2) Tr(tau) * identity."""
    tau = np.asarray(tau, dtype=float)
    return tau - 0.5 * np.trace(tau) * np.eye(3)


def rescale(sigma_reduced, r_over_a: float, params: MediumParams = REDUCED) -> np.ndarray:
    """Physical stress sigma(r; a, n1) = sigma_reduced(r/a) / (a^4 n1), units hbar*c.

    ``r_over_a`` does not enter the map; it is kept so the call site states
    where the reduced value was taken.
    """
    _reduced_radius(r_over_a)
    return np.asarray(sigma_reduced, dtype=float) / (params.a**4 * params.n1)


def stress_eigenvalue(r, params: MediumParams = REDUCED):
    """Scalar s(r) with sigma = s * identity; vectorised over ``r``."""
    rho = np.asarray(r, dtype=float) / params.a
    if np.any(rho < 0) or np.any(rho >= 1):
        raise DomainError("radius must satisfy 0 <= r/a < 1")
    n = refractive_index(np.asarray(r, dtype=float), params)
    return -1.0 / (np.pi**2 * params.a**4 * n * (1.0 - rho * rho) ** 4)


def casimir_stress(r: float, params: MediumParams = REDUCED) -> np.ndarray:
    """Casimir stress tensor -identity / (pi^2 a^4 n(r) (1 - r^2/a^2)^4), units hbar*c."""
    return float(stress_eigenvalue(r, params)) * np.eye(3)


def force_density(r, params: MediumParams = REDUCED):
    """Radial component of div(sigma), i.e. ds/dr; negative means attraction to the centre.

    Reduced form: -rho (5 + 3 rho^2) / (pi^2 (1 - rho^2)^5), scaled by 1/(a^5 n1).
    """
    rho = np.asarray(r, dtype=float) / params.a
    if np.any(rho < 0) or np.any(rho >= 1):
        raise DomainError("radius must satisfy 0 <= r/a < 1")
    reduced = -rho * (5.0 + 3.0 * rho * rho) / (np.pi**2 * (1.0 - rho * rho) ** 5)
    return reduced / (params.a**5 * params.n1)
