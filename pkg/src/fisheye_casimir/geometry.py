"""Fish-eye medium inside a spherical mirror: index profile, the conformal
separation of two points, and the inversion through the mirror.

Internally lengths are measured in units of the mirror radius and the index
constant is one; :class:`MediumParams` only enters at the API boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class MediumParams:
    """Mirror radius ``a`` and index constant ``n1``."""

    a: float = 1.0
    n1: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise DomainError(f"mirror radius a must be > 0, got {self.a}")
        if not (np.isfinite(self.n1) and self.n1 > 0):
            raise DomainError(f"index constant n1 must be > 0, got {self.n1}")


REDUCED = MediumParams()


def refractive_index(r, params: MediumParams = REDUCED):
    """n(r) = 2 n1 / (1 + (r/a)^2); equal to both permittivity and permeability.

    ``r`` is in the same length unit as ``params.a``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be >= 0")
    rho = r / params.a
    return 2.0 * params.n1 / (1.0 + rho * rho)


def _as_point(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (3,):
        raise DomainError(f"points need a trailing axis of length 3, got shape {p.shape}")
    return p


def mobius_separation(r, r0):
    """|r - r0| / sqrt(1 + 2 r.r0 + r^2 r0^2), the stereographic chord on the hypersphere.

    Accepts batched points (trailing axis of length 3).
    """
    r, r0 = _as_point(r), _as_point(r0)
    d = r - r0
    radicand = 1.0 + 2.0 * np.sum(r * r0, axis=-1) + np.sum(r * r, axis=-1) * np.sum(r0 * r0, axis=-1)
    if np.any(radicand <= 0):
        raise DomainError("Mobius radicand is not positive")
    return np.sqrt(np.sum(d * d, axis=-1)) / np.sqrt(radicand)


def mobius_separation_dual(x, x0):
    """Same formula on sequences of HyperDual coordinates (no domain checks)."""
    d2 = sum((a - b) * (a - b) for a, b in zip(x, x0))
    dot = sum(a * b for a, b in zip(x, x0))
    rr = sum(a * a for a in x)
    rr0 = sum(b * b for b in x0)
    return np.sqrt(d2 / (1.0 + 2.0 * dot + rr * rr0))


def on_axis_separation(r):
    """(1/r - r)/2: separation between a point at radius r and its mirror image."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1):
        raise DomainError("on-axis separation needs 0 < r < 1")
    return 0.5 * (1.0 / r - r)


def image_point(r):
    """Inversion through the unit mirror, r -> r / |r|^2."""
    r = _as_point(r)
    rr = np.sum(r * r, axis=-1, keepdims=True)
    if np.any(rr == 0):
        raise DomainError("the centre has no image (it maps to infinity)")
    return r / rr


def inversion_jacobian(r):
    """Jacobian of the inversion, 1/r^2 - 2 r(x)r / r^4 (symmetric)."""
    r = _as_point(r)
    rr = np.sum(r * r, axis=-1)[..., None, None]
    if np.any(rr == 0):
        raise DomainError("inversion Jacobian is singular at the centre")
    return np.eye(3) / rr - 2.0 * r[..., :, None] * r[..., None, :] / rr**2
