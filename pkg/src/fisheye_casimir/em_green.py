"""Electromagnetic bi-tensor Green function of the fish eye at imaginary
wavenumber i*kappa.

Rows index the field direction at ``r``, columns the source direction at
``r0``. The free Green function is

    G0 = -curl[ n(r') grad grad0 D(r') ] curl0 / (n(r) n(r0) kappa^2)

where ``curl`` acts on the row index through r and ``curl0`` on the column
index through r0 (C_ij = eps_ikl eps_jpq d_k d0_p W_lq). All four
derivatives are taken exactly with :class:`~fisheye_casimir.numerics.HyperDual`
arithmetic; a finite-difference variant is kept as an oracle.

The mirror is added by an image source at r/|r|^2, mapped back with the
inversion Jacobian: G = G0(r) - P G0(r^-1).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CoincidenceError, DomainError, StepSizeError
from .geometry import image_point, inversion_jacobian, mobius_separation_dual, on_axis_separation, refractive_index
from .numerics import (
    LEVI_CIVITA,
    FDConfig,
    HyperDual,
    QuadratureConfig,
    fd_curl,
    fd_mixed_partials,
    integrate_semi_infinite,
)
from .scalar_green import d2D_dr2, dD_dr, decay_rate, scalar_D_dual

EXCLUSION_RADIUS = 1e-6

_COMBOS = np.array(list(itertools.product(range(3), repeat=4)))   # (k, l, p, q)
_PAIRS = np.array(list(itertools.product(range(3), repeat=2)))    # (l, q)


def _points(r, r0):
    r = np.asarray(r, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    if r.shape[-1:] != (3,) or r0.shape[-1:] != (3,):
        raise DomainError("points need a trailing axis of length 3")
    batch = np.broadcast_shapes(r.shape[:-1], r0.shape[:-1])
    return np.broadcast_to(r, batch + (3,)), np.broadcast_to(r0, batch + (3,)), batch


def _kappas(kappa):
    k = np.asarray(kappa, dtype=float)
    if k.ndim > 1:
        raise DomainError("kappa must be a scalar or a 1-d array")
    if np.any(~(k > 0)):
        raise DomainError("kappa must be > 0")
    return np.atleast_1d(k), k.ndim == 0


def _check_separated(r, r0, exclusion):
    sep = np.linalg.norm(r - r0, axis=-1)
    if np.any(sep < exclusion):
        raise CoincidenceError(f"|r - r0| = {np.min(sep):.3g} is inside the exclusion radius {exclusion}")


def _dual_coordinates(r, r0, combos):
    ncomb = combos.shape[0]
    bshape = (ncomb,) + (1,) * (r.ndim - 1)
    zero = np.zeros(bshape)
    x, x0 = [], []
    for i in range(3):
        sk = (combos[:, 0] == i).astype(float).reshape(bshape)
        sl = (combos[:, 1] == i).astype(float).reshape(bshape)
        sp = (combos[:, 2] == i).astype(float).reshape(bshape)
        sq = (combos[:, 3] == i).astype(float).reshape(bshape)
        x.append(HyperDual.variable(r[..., i], [sk, sl, zero, zero]))
        x0.append(HyperDual.variable(r0[..., i], [zero, zero, sp, sq]))
    return x, x0


def _curl_curl(r, r0, scalar, extra_ndim):
    """-C[n(r') grad grad0 S(r')] / (n(r) n(r0)) for a scalar kernel S.

    ``scalar`` maps the HyperDual separation (batch ``(81, *batch)``) to a
    HyperDual that may append ``extra_ndim`` trailing axes. Output shape is
    ``(*batch, *extra, 3, 3)``.
    """
    x, x0 = _dual_coordinates(r, r0, _COMBOS)
    rp = mobius_separation_dual(x, x0)
    S = scalar(rp)
    n_sep = 2.0 / (1.0 + rp * rp)
    nc = n_sep.c.reshape(n_sep.c.shape + (1,) * extra_ndim)
    # d_k d0_p [n(r') d_l d0_q S]; units: k=1, l=2, p=4, q=8
    T = nc[5] * S.c[10] + nc[1] * S.c[14] + nc[4] * S.c[11] + nc[0] * S.c[15]
    T = T.reshape((3, 3, 3, 3) + T.shape[1:])
    C = np.einsum("ikl,jpq,klpq...->...ij", LEVI_CIVITA, LEVI_CIVITA, T)
    nn = refractive_index(np.linalg.norm(r, axis=-1)) * refractive_index(np.linalg.norm(r0, axis=-1))
    nn = nn.reshape(nn.shape + (1,) * extra_ndim + (1, 1))
    return -C / nn


def green_free(r, r0, kappa, exclusion: float = EXCLUSION_RADIUS):
    """Free fish-eye Green function G0(r, r0; i kappa).

    Points may be batched (trailing axis 3); ``kappa`` may be a 1-d array,
    in which case a kappa axis is inserted before the two tensor axes.
    """
    r, r0, _ = _points(r, r0)
    ks, scalar_k = _kappas(kappa)
    _check_separated(r, r0, exclusion)
    G = _curl_curl(r, r0, lambda rp: scalar_D_dual(rp[..., None], ks), 1)
    G = G / (ks * ks)[:, None, None]
    return G[..., 0, :, :] if scalar_k else G


def green_free_integrated(r, r0, exclusion: float = EXCLUSION_RADIUS):
    """Integral over kappa in (0, inf) of kappa^2 G0(r, r0; i kappa), in closed form.

    kappa^2 cancels the 1/kappa^2 of G0, so the integral acts on D alone and
    D can be replaced by its closed-form kappa-integral before differentiating.
    """
    r, r0, _ = _points(r, r0)
    _check_separated(r, r0, exclusion)
    return _curl_curl(r, r0, lambda rp: (1.0 + rp * rp) / (16.0 * np.pi * rp * rp), 0)


def green_free_fd(r, r0, kappa: float, cfg: FDConfig | None = None, exclusion: float = EXCLUSION_RADIUS):
    """Oracle for :func:`green_free`: exact grad grad0 D, finite-difference curls."""
    cfg = cfg or FDConfig()
    r, r0, batch = _points(r, r0)
    if batch:
        raise DomainError("green_free_fd takes single points")
    ks, _ = _kappas(kappa)
    k = float(ks[0])
    sep = float(np.linalg.norm(r - r0))
    if sep < exclusion:
        raise CoincidenceError("field and source points coincide")

    def weighted_hessian(a, b):
        combos = np.zeros((9, 4), dtype=int)
        combos[:, 1] = _PAIRS[:, 0]
        combos[:, 3] = _PAIRS[:, 1]
        x, x0 = _dual_coordinates(a, b, combos)
        rp = mobius_separation_dual(x, x0)
        D = scalar_D_dual(rp, k)
        n_sep = 2.0 / (1.0 + rp.value * rp.value)
        W = n_sep * D.c[10]                              # (9, N)
        return np.moveaxis(W.reshape((3, 3) + W.shape[1:]), (0, 1), (-2, -1))

    if 2.0 * np.sqrt(2.0) * cfg.step_scale * sep >= sep:
        raise StepSizeError("finite-difference stencil reaches the source")
    J = fd_mixed_partials(weighted_hessian, r, r0, cfg, scale=sep)   # [k, p, l, q]
    C = np.einsum("ikl,jpq,kplq->ij", LEVI_CIVITA, LEVI_CIVITA, J)
    nn = refractive_index(np.linalg.norm(r)) * refractive_index(np.linalg.norm(r0))
    return -C / (nn * k * k)


def _check_inside(r, on_mirror):
    rad = np.linalg.norm(r, axis=-1)
    if np.any(rad == 0):
        raise DomainError("reflected Green function is undefined at the centre")
    limit_ok = rad <= 1.0 + 1e-12 if on_mirror else rad < 1.0
    if not np.all(limit_ok):
        raise DomainError("field point must lie inside the mirror")


def green_reflected(r, r0, kappa, on_mirror: bool = False):
    """Mirror-reflected part -P(r) G0(r/|r|^2, r0); finite at r = r0.

    ``on_mirror=True`` also admits field points on the mirror itself, which
    only boundary-condition checks need.
    """
    r, r0, _ = _points(r, r0)
    _check_inside(r, on_mirror)
    ks, scalar_k = _kappas(kappa)
    P = inversion_jacobian(r)
    G0 = green_free(image_point(r), r0, ks, exclusion=0.0)
    out = -np.einsum("...ab,...kbc->...kac", P, G0)
    return out[..., 0, :, :] if scalar_k else out


def green_total(r, r0, kappa, exclusion: float = EXCLUSION_RADIUS):
    """Free plus reflected Green function; admits field points on the mirror."""
    return green_free(r, r0, kappa, exclusion) + green_reflected(r, r0, kappa, on_mirror=True)


def symmetrized(green, r, r0, kappa, **kw):
    """G_s = (G(r, r0) + G(r0, r)^T) / 2 for any of the Green functions here."""
    return 0.5 * (green(r, r0, kappa, **kw) + np.swapaxes(green(r0, r, kappa, **kw), -1, -2))


@dataclass(frozen=True)
class ReflectedDiagonal:
    """-P G0(r^-1) on the x axis at coincidence: prefactor * diag(d1, d2, d2)."""

    d1: float
    d2: float
    prefactor: float

    def matrix(self):
        return self.prefactor * np.diag([self.d1, self.d2, self.d2])


def reflected_diagonal_on_axis(r: float, kappa: float) -> ReflectedDiagonal:
    """Closed-form reflected tensor at r = r0 = (r, 0, 0)."""
    rp = float(on_axis_separation(r))
    if not kappa > 0:
        raise DomainError("kappa must be > 0")
    d = float(dD_dr(rp, kappa))
    d1 = 2.0 * d
    d2 = -d - rp * float(d2D_dr2(rp, kappa))
    prefactor = (1.0 + r * r) ** 2 / (16.0 * kappa * kappa * r**4 * rp)
    return ReflectedDiagonal(d1, d2, prefactor)


def integrated_reflected_kernel(point, method: str = "closed", quad: QuadratureConfig | None = None):
    """Integral over kappa of kappa^2 G_s,reflected(r, r; i kappa) at a point inside the mirror.

    ``method="closed"`` differentiates the closed-form kappa-integral of D;
    ``method="quadrature"`` integrates the full reflected tensor numerically.
    """
    point = np.asarray(point, dtype=float)
    _check_inside(point, False)
    if method == "closed":
        M = -inversion_jacobian(point) @ green_free_integrated(image_point(point), point)
        return 0.5 * (M + M.T)
    if method == "quadrature":
        rp = float(on_axis_separation(np.linalg.norm(point)))

        def integrand(ks):
            G = green_reflected(point, point, ks)
            return (ks * ks)[:, None, None] * 0.5 * (G + np.swapaxes(G, -1, -2))

        value, _ = integrate_semi_infinite(integrand, float(decay_rate(rp)), quad)
        return value
    raise DomainError(f"unknown method {method!r}")


def tangential_ratio(r, r0, kappa):
    """max |tangential rows of G_total| / max |G_total| at a field point on the mirror."""
    r = np.asarray(r, dtype=float)
    normal = r / np.linalg.norm(r)
    G = green_total(r, r0, kappa)
    tangential = (np.eye(3) - np.outer(normal, normal)) @ G
    return float(np.max(np.abs(tangential)) / np.max(np.abs(G)))


_PARTS = {
    "free": lambda a, b, k: green_free(a, b, k, exclusion=0.0),
    "reflected": lambda a, b, k: green_reflected(a, b, k),
    "total": lambda a, b, k: green_total(a, b, k, exclusion=0.0),
}


def _singular_distance(r, r0, part):
    d_free = float(np.linalg.norm(r - r0))
    d_refl = min(float(np.linalg.norm(r)), float(np.linalg.norm(r - image_point(r0))) if np.any(r0) else np.inf)
    return {"free": d_free, "reflected": d_refl, "total": min(d_free, d_refl)}[part]


def magnetic_green_oracle(r, r0, kappa: float, part: str = "free", cfg: FDConfig | None = None,
                          scale: float | None = None, exclusion: float = EXCLUSION_RADIUS):
    """-curl G curl0 / (n(r) n(r0) kappa^2) by finite-difference curls.

    ``part`` picks the Green function differentiated: ``"free"``,
    ``"reflected"`` or ``"total"``. The step is ``cfg.step_scale * scale``;
    ``scale`` defaults to the distance from ``r`` to the nearest singularity
    of the chosen part.
    """
    cfg = cfg or FDConfig()
    if part not in _PARTS:
        raise DomainError(f"unknown part {part!r}")
    r = np.asarray(r, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    if part != "reflected" and np.linalg.norm(r - r0) < exclusion:
        raise CoincidenceError("field and source points coincide")
    if not kappa > 0:
        raise DomainError("kappa must be > 0")
    dist = _singular_distance(r, r0, part)
    scale = dist if scale is None else scale
    if 2.0 * np.sqrt(2.0) * cfg.step_scale * scale >= dist:
        raise StepSizeError("finite-difference step exceeds the distance to the source")
    green = _PARTS[part]
    J = fd_mixed_partials(lambda a, b: green(a, b, kappa), r, r0, cfg, scale)   # [k, p, l, q]
    C = np.einsum("ikl,jpq,kplq->ij", LEVI_CIVITA, LEVI_CIVITA, J)
    nn = refractive_index(np.linalg.norm(r)) * refractive_index(np.linalg.norm(r0))
    return -C / (nn * kappa * kappa)


def wave_equation_residual(r, r0, kappa: float, cfg: FDConfig | None = None):
    """Relative residual of curl (1/n) curl G0 + n kappa^2 G0 = 0 away from the source."""
    cfg = cfg or FDConfig()
    r = np.asarray(r, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    sep = float(np.linalg.norm(r - r0))
    if sep < EXCLUSION_RADIUS:
        raise CoincidenceError("wave-equation check needs r != r0")

    def inner(pts):
        curl = fd_curl(lambda p: green_free(p, r0, kappa, exclusion=0.0), pts, cfg, sep)
        return curl / refractive_index(np.linalg.norm(pts, axis=-1))[:, None, None]

    lhs = fd_curl(inner, r, cfg, sep)
    n = refractive_index(np.linalg.norm(r))
    g_term = n * kappa * kappa * green_free(r, r0, kappa)
    return float(np.max(np.abs(lhs + g_term)) / np.max(np.abs(g_term)))
