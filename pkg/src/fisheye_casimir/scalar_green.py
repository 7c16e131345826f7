"""Conformally coupled scalar Green function on the hypersphere.

    D(r', k) = (r' + 1/r') sinh(2 k arccot r') / (8 pi sinh(pi k))

together with its integral over k, which has the closed form
(1 + r'^2) / (16 pi r'^2), and its first two derivatives in r'.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import HyperDual, QuadratureConfig, arccot, integrate_semi_infinite

_8PI = 8.0 * np.pi


@dataclass(frozen=True)
class ScalarGreenPoint:
    r_prime: float
    kappa: float

    def __post_init__(self):
        if not self.r_prime > 0:
            raise DomainError(f"r_prime must be > 0, got {self.r_prime}")
        if not self.kappa >= 0:
            raise DomainError(f"kappa must be >= 0, got {self.kappa}")

    @property
    def theta(self):
        return float(arccot(self.r_prime))

    def D(self):
        return float(scalar_D(self.r_prime, self.kappa))

    def dD(self):
        return float(dD_dr(self.r_prime, self.kappa))

    def d2D(self):
        return float(d2D_dr2(self.r_prime, self.kappa))


def _check_rp(r_prime):
    if isinstance(r_prime, HyperDual):
        return r_prime
    r_prime = np.asarray(r_prime, dtype=float)
    if np.any(~(r_prime > 0)):
        raise DomainError("r_prime must be > 0")
    return r_prime


def decay_rate(r_prime):
    """Exponential decay rate of D in k: pi - 2 arccot r'."""
    return np.pi - 2.0 * arccot(_check_rp(r_prime))


def _ratios(theta, kappa):
    """sinh(2k t)/sinh(pi k), k cosh(2k t)/sinh(pi k), k^2 sinh(2k t)/sinh(pi k).

    Written with decaying exponentials so nothing overflows for large k;
    k = 0 takes the analytic limits.
    """
    kappa = np.asarray(kappa, dtype=float)
    zero = kappa == 0
    k = np.where(zero, 1.0, kappa)
    lead = np.exp(k * (2.0 * theta - np.pi)) / -np.expm1(-2.0 * np.pi * k)
    s = lead * -np.expm1(-4.0 * k * theta)
    c = lead * (1.0 + np.exp(-4.0 * k * theta))
    rs = np.where(zero, 2.0 * theta / np.pi, s)
    rc1 = np.where(zero, 1.0 / np.pi, k * c)
    rs2 = np.where(zero, 0.0, k * k * s)
    return rs, rc1, rs2


def scalar_D(r_prime, kappa):
    """D(r', k); arrays broadcast. k = 0 gives (r' + 1/r') arccot(r') / (4 pi^2)."""
    r_prime = _check_rp(r_prime)
    if np.any(np.asarray(kappa) < 0):
        raise DomainError("kappa must be >= 0")
    theta = arccot(r_prime)
    rs, _, _ = _ratios(theta, kappa)
    return (r_prime + 1.0 / r_prime) * rs / _8PI


def scalar_D_dual(r_prime: HyperDual, kappa):
    """D on a HyperDual separation; ``kappa`` (> 0) broadcasts against the batch axes."""
    kappa = np.asarray(kappa, dtype=float)
    theta = r_prime.arccot()
    num = np.exp(kappa * (2.0 * theta - np.pi)) * -np.expm1(theta * (-4.0 * kappa))
    return (r_prime + 1.0 / r_prime) * num * (1.0 / (-_8PI * np.expm1(-2.0 * np.pi * kappa)))


def dD_dr(r_prime, kappa):
    """First derivative of D with respect to r'."""
    r_prime = _check_rp(r_prime)
    theta = arccot(r_prime)
    rs, rc1, _ = _ratios(theta, kappa)
    amp = r_prime + 1.0 / r_prime
    damp = 1.0 - 1.0 / r_prime**2
    dtheta = -1.0 / (1.0 + r_prime**2)
    return (damp * rs + amp * 2.0 * dtheta * rc1) / _8PI


def d2D_dr2(r_prime, kappa):
    """Second derivative of D with respect to r'."""
    r_prime = _check_rp(r_prime)
    theta = arccot(r_prime)
    rs, rc1, rs2 = _ratios(theta, kappa)
    amp = r_prime + 1.0 / r_prime
    damp = 1.0 - 1.0 / r_prime**2
    d2amp = 2.0 / r_prime**3
    q = 1.0 + r_prime**2
    dtheta = -1.0 / q
    d2theta = 2.0 * r_prime / q**2
    ds = 2.0 * dtheta * rc1
    d2s = 4.0 * dtheta**2 * rs2 + 2.0 * d2theta * rc1
    return (d2amp * rs + 2.0 * damp * ds + amp * d2s) / _8PI


def integral_D_closed(r_prime):
    """Closed form of the k-integral of D: (1 + r'^2) / (16 pi r'^2)."""
    r_prime = _check_rp(r_prime)
    return (1.0 + r_prime * r_prime) / (16.0 * np.pi * r_prime * r_prime)


def integral_D_derivs(r_prime):
    """First and second r'-derivatives of :func:`integral_D_closed`."""
    r_prime = _check_rp(r_prime)
    return -1.0 / (_8PI * r_prime**3), 3.0 / (_8PI * r_prime**4)


def integral_D_quad(r_prime: float, quad: QuadratureConfig | None = None):
    """Numerical k-integral of D; returns ``(value, error_estimate)``."""
    rp = float(_check_rp(r_prime))
    return integrate_semi_infinite(lambda k: scalar_D(rp, k), float(decay_rate(rp)), quad)
