"""Self-verification suite: every analytic step checked against an
independent numerical route, one report line per check."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import em_green, scalar_green, stress
from .geometry import MediumParams, refractive_index
from .numerics import FDConfig, QuadratureConfig, fd_derivative


@dataclass(frozen=True)
class VerificationReport:
    check_name: str
    measured_error: float
    tolerance: float

    @property
    def status(self) -> str:
        return "pass" if self.measured_error <= self.tolerance else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def line(self) -> str:
        return (f"{self.status.upper():4s}  {self.check_name:32s}  "
                f"error={self.measured_error:.3e}  tol={self.tolerance:.1e}")


def _rel(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def _spread(T):
    ev = np.linalg.eigvalsh(0.5 * (T + T.T))
    return float((ev.max() - ev.min()) / np.max(np.abs(ev)))


RPRIME_GRID = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0)
OFF_AXIS_POINTS = (
    (0.3, 0.4, 0.0), (0.1, -0.2, 0.3), (-0.5, 0.2, 0.4), (0.0, 0.0, -0.7), (0.45, 0.45, 0.45),
)
MAGNETIC_SAMPLES = (
    ((0.4, 0.0, 0.0), (0.1, 0.2, 0.0), 1.0),
    ((0.2, 0.3, -0.1), (-0.1, 0.1, 0.2), 0.5),
    ((-0.3, 0.1, 0.4), (0.2, -0.2, 0.1), 2.0),
    ((0.5, -0.4, 0.1), (0.3, 0.1, -0.3), 1.5),
    ((0.05, 0.6, 0.2), (-0.4, 0.2, 0.0), 0.8),
)


def check_kappa_integral(quad):
    err = max(abs(scalar_green.integral_D_quad(rp, quad)[0] - scalar_green.integral_D_closed(rp))
              / scalar_green.integral_D_closed(rp) for rp in RPRIME_GRID)
    return VerificationReport("kappa_integral_identity", err, 1e-10)


def check_pipeline(quad):
    err = 0.0
    for r in np.linspace(0.1, 0.9, 20):
        sigma = stress.stress_from_tau(stress.tau_regularized_quadrature(r, quad))
        err = max(err, _rel(sigma, stress.casimir_stress(r)))
    return VerificationReport("stress_pipeline_vs_closed_form", err, 1e-8)


def check_isotropy(quad, full=False):
    spreads = [_spread(stress.tau_regularized_quadrature(r, quad)) for r in (0.2, 0.5, 0.8)]
    methods = ("closed", "quadrature") if full else ("closed",)
    for p in OFF_AXIS_POINTS:
        for m in methods:
            spreads.append(_spread(stress.tau_full_tensor(p, m, quad)))
    return VerificationReport("isotropy_eigenvalue_spread", max(spreads), 1e-7)


def check_off_axis_value(quad, full=False):
    methods = ("closed", "quadrature") if full else ("closed",)
    err = 0.0
    for p in OFF_AXIS_POINTS:
        for m in methods:
            err = max(err, _rel(stress.tau_full_tensor(p, m, quad),
                                stress.tau_regularized(np.linalg.norm(p))))
    return VerificationReport("off_axis_tau_vs_closed_form", err, 1e-8)


def check_two_path():
    err = 0.0
    for r in (0.2, 0.5, 0.8):
        p = np.array([r, 0.0, 0.0])
        for k in (0.5, 1.0, 3.0):
            err = max(err, _rel(em_green.green_reflected(p, p, k),
                                em_green.reflected_diagonal_on_axis(r, k).matrix()))
    return VerificationReport("two_path_reflected_green", err, 1e-8)


def transversality_samples():
    rng = np.random.default_rng(7)
    out = []
    for k in (0.5, 1.0, 2.0):
        for _ in range(4):
            n = rng.normal(size=3)
            src = rng.normal(size=3)
            src *= rng.uniform(0.1, 0.8) / np.linalg.norm(src)
            out.append((n / np.linalg.norm(n), src, k))
    return out


def check_transversality():
    err = max(em_green.tangential_ratio(r, r0, k) for r, r0, k in transversality_samples())
    return VerificationReport("mirror_tangential_components", err, 1e-6)


def check_magnetic(part):
    err = 0.0
    green = em_green.green_free if part == "free" else em_green.green_reflected
    for r, r0, k in MAGNETIC_SAMPLES:
        gm = em_green.magnetic_green_oracle(r, r0, k, part)
        err = max(err, _rel(gm, green(np.array(r), np.array(r0), k)))
    return VerificationReport(f"magnetic_equals_electric_{part}", err, 1e-4)


def magnetic_convergence_order(r=(0.4, 0.0, 0.0), r0=(0.1, 0.2, 0.0), kappa=1.0, steps=(0.04, 0.02)):
    g = em_green.green_free(np.array(r), np.array(r0), kappa)
    errs = [_rel(em_green.magnetic_green_oracle(r, r0, kappa, "free", FDConfig(4, h)), g) for h in steps]
    return math.log(errs[0] / errs[1]) / math.log(steps[0] / steps[1])


def check_magnetic_order():
    order = magnetic_convergence_order()
    return VerificationReport("magnetic_oracle_fd_order_4", abs(order - 4.0), 0.5)


def check_scaling():
    r_over_a = 0.37
    ref = None
    err = 0.0
    for a in (0.5, 1.0, 2.0):
        for n1 in (0.5, 1.0, 3.0):
            params = MediumParams(a, n1)
            inv = stress.casimir_stress(r_over_a * a, params) * a**4 * n1
            ref = inv if ref is None else ref
            err = max(err, _rel(inv, ref))
            # rescaled reduced pipeline must agree with the direct physical formula
            piped = stress.rescale(stress.stress_from_tau(stress.tau_regularized(r_over_a)), r_over_a, params)
            err = max(err, _rel(piped, stress.casimir_stress(r_over_a * a, params)))
    return VerificationReport("scaling_invariance", err, 1e-12)


def force_fd_error(radii=np.linspace(0.05, 0.9, 18)):
    err = 0.0
    for r in radii:
        fd = fd_derivative(stress.stress_eigenvalue, r, 1, FDConfig(4, 1e-3), scale=1.0 - r)
        err = max(err, abs(fd - stress.force_density(r)) / abs(stress.force_density(r)))
    return err


def check_force():
    sweep = stress.force_density(np.arange(1, 10) / 10.0)
    if stress.force_density(0.0) != 0.0 or np.any(sweep >= 0):
        return VerificationReport("force_attractive_and_consistent", math.inf, 1e-7)
    return VerificationReport("force_attractive_and_consistent", force_fd_error(), 1e-7)


def check_divergence():
    r = 0.999
    err = abs(stress.stress_eigenvalue(r) * (1 - r * r) ** 4 * -np.pi**2 - 1.0)
    return VerificationReport("divergence_at_mirror", err, 1e-6)


def check_boundary_identity():
    r = np.linspace(0.0, 0.999, 200)
    prod = stress.stress_eigenvalue(r) * refractive_index(r) * (1 - r * r) ** 4
    return VerificationReport("boundary_identity_exact", float(np.max(np.abs(prod * np.pi**2 + 1.0))), 1e-12)


def check_scalar_derivatives(order):
    exact = scalar_green.dD_dr if order == 1 else scalar_green.d2D_dr2
    cfg = FDConfig(4, 1e-3 if order == 1 else 1e-2)
    err = 0.0
    for rp in (0.1, 0.5, 1.0, 2.0, 5.0):
        for k in (0.1, 1.0, 10.0):
            fd = fd_derivative(lambda x: scalar_green.scalar_D(x, k), rp, order, cfg, scale=rp)
            err = max(err, abs(fd - exact(rp, k)) / abs(exact(rp, k)))
    return VerificationReport(f"scalar_derivative_{order}_vs_fd", err, 1e-6 if order == 1 else 1e-5)


def check_wave_equation():
    samples = [((0.4, 0.1, -0.2), (0.1, 0.2, 0.05), 1.3), ((0.2, -0.3, 0.1), (-0.2, 0.1, 0.3), 0.7),
               ((0.6, 0.2, 0.1), (0.1, 0.1, 0.1), 2.5)]
    err = max(em_green.wave_equation_residual(r, r0, k, FDConfig(4, 1e-2)) for r, r0, k in samples)
    return VerificationReport("wave_equation_residual", err, 1e-4)


def check_green_symmetries():
    from scipy.spatial.transform import Rotation

    rng = np.random.default_rng(11)
    err = 0.0
    for _ in range(20):
        r = rng.uniform(-0.5, 0.5, 3)
        r0 = rng.uniform(-0.5, 0.5, 3)
        k = rng.uniform(0.3, 3.0)
        R = Rotation.random(random_state=rng).as_matrix()
        g = em_green.green_free(r, r0, k)
        err = max(err, _rel(em_green.green_free(r0, r, k).T, g),
                  _rel(em_green.green_free(R @ r, R @ r0, k), R @ g @ R.T))
    return VerificationReport("green_reciprocity_rotation", err, 1e-8)


def check_green_fd_oracle():
    err = 0.0
    for r, r0, k in MAGNETIC_SAMPLES:
        r, r0 = np.array(r), np.array(r0)
        err = max(err, _rel(em_green.green_free_fd(r, r0, k), em_green.green_free(r, r0, k)))
    return VerificationReport("green_dual_vs_fd_curls", err, 1e-6)


def check_profile_determinism():
    from .cli import profile_rows, format_rows

    runs = {format_rows(profile_rows(1.0, 1.0, 0.0, 0.99, 100), "csv") for _ in range(3)}
    return VerificationReport("profile_bit_identical", float(len(runs) - 1), 0.0)


def checks(level: str = "fast", quad: QuadratureConfig | None = None) -> list[Callable[[], VerificationReport]]:
    quad = quad or QuadratureConfig()
    full = level == "full"
    suite = [
        lambda: check_kappa_integral(quad),
        lambda: check_pipeline(quad),
        lambda: check_isotropy(quad, full),
        lambda: check_off_axis_value(quad, full),
        check_two_path,
        check_transversality,
        lambda: check_magnetic("free"),
        lambda: check_magnetic("reflected"),
        check_magnetic_order,
        check_scaling,
        check_force,
        check_divergence,
        check_boundary_identity,
        lambda: check_scalar_derivatives(1),
        lambda: check_scalar_derivatives(2),
        check_profile_determinism,
    ]
    if full:
        suite += [check_wave_equation, check_green_symmetries, check_green_fd_oracle]
    return suite


def run(level: str = "fast", quad: QuadratureConfig | None = None) -> list[VerificationReport]:
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    return [check() for check in checks(level, quad)]
