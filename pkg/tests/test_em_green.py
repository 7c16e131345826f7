import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from fisheye_casimir.em_green import (
    green_free,
    green_free_fd,
    green_free_integrated,
    green_reflected,
    green_total,
    integrated_reflected_kernel,
    magnetic_green_oracle,
    reflected_diagonal_on_axis,
    symmetrized,
    tangential_ratio,
    wave_equation_residual,
)
from fisheye_casimir.errors import CoincidenceError, DomainError, StepSizeError
from fisheye_casimir.numerics import FDConfig, integrate_semi_infinite
from fisheye_casimir.scalar_green import decay_rate, scalar_D

# mpmath: d/dr' D(r', 1) at r' = 0.75
DD_075_1 = -0.03841923206080881535037265339945251186263


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) / np.max(np.abs(b))


@pytest.fixture(scope="module")
def samples():
    rng = np.random.default_rng(2024)
    out = []
    while len(out) < 20:
        r, r0 = rng.uniform(-0.55, 0.55, (2, 3))
        if np.linalg.norm(r - r0) > 0.1:
            out.append((r, r0, rng.uniform(0.2, 4.0), Rotation.random(random_state=rng).as_matrix()))
    return out


def test_reciprocity_example():
    r, r0 = np.array([0.3, 0.1, 0.0]), np.array([0.1, -0.2, 0.1])
    np.testing.assert_allclose(green_free(r, r0, 1.0), green_free(r0, r, 1.0).T, atol=1e-8)


def test_reciprocity_and_rotation_covariance(samples):
    for r, r0, k, R in samples:
        g = green_free(r, r0, k)
        assert rel(green_free(r0, r, k).T, g) <= 1e-8
        assert rel(green_free(R @ r, R @ r0, k), R @ g @ R.T) <= 1e-8


def test_symmetrized_equals_plain_for_reciprocal_green(samples):
    r, r0, k, _ = samples[0]
    np.testing.assert_allclose(symmetrized(green_free, r, r0, k), green_free(r, r0, k), rtol=1e-12)


def test_batched_and_kappa_vector_evaluation(samples):
    rs = np.array([s[0] for s in samples[:4]])
    r0s = np.array([s[1] for s in samples[:4]])
    ks = np.array([0.5, 1.0, 2.0])
    G = green_free(rs, r0s, ks)
    assert G.shape == (4, 3, 3, 3)
    np.testing.assert_allclose(G[2, 1], green_free(rs[2], r0s[2], 1.0), rtol=1e-14)


def test_dual_path_matches_fd_curl_oracle(samples):
    for r, r0, k, _ in samples[:5]:
        assert rel(green_free_fd(r, r0, k), green_free(r, r0, k)) <= 1e-6


def test_near_field_has_static_dipole_signs():
    G = green_free([0.1, 0, 0], [0.13, 0, 0], 1.0)
    assert G[0, 0] < 0 < G[1, 1]
    assert G[0, 0] == pytest.approx(-2 * G[1, 1], rel=0.01)


@pytest.mark.parametrize("r, r0, k", [
    ((0.4, 0.1, -0.2), (0.1, 0.2, 0.05), 1.3),
    ((0.2, -0.3, 0.1), (-0.2, 0.1, 0.3), 0.7),
])
def test_wave_equation_spot_check(r, r0, k):
    assert wave_equation_residual(r, r0, k, FDConfig(4, 1e-2)) <= 1e-4


def test_coincidence_rejected():
    p = np.array([0.2, 0.1, 0.0])
    with pytest.raises(CoincidenceError):
        green_free(p, p, 1.0)
    with pytest.raises(CoincidenceError):
        magnetic_green_oracle(p, p + 1e-8, 1.0)


@pytest.mark.parametrize("k", [0.0, -1.0])
def test_kappa_must_be_positive(k):
    with pytest.raises(DomainError):
        green_free([0.1, 0, 0], [0.2, 0, 0], k)


@pytest.mark.parametrize("r", [(0, 0, 0), (1.0, 0, 0), (0.8, 0.8, 0)])
def test_reflected_domain(r):
    with pytest.raises(DomainError):
        green_reflected(np.array(r, float), np.array([0.1, 0, 0]), 1.0)


@pytest.mark.parametrize("r", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("k", [0.5, 1.0, 3.0])
def test_two_path_equality(r, k):
    p = np.array([r, 0.0, 0.0])
    assert rel(green_reflected(p, p, k), reflected_diagonal_on_axis(r, k).matrix()) <= 1e-8


def test_reflected_diagonal_example():
    d = reflected_diagonal_on_axis(0.5, 1.0)
    assert d.d1 == pytest.approx(2 * DD_075_1, rel=1e-12)
    assert d.prefactor == pytest.approx(1.25**2 / (16 * 0.0625 * 0.75), rel=1e-15)


def test_d2_matches_fd_grid():
    for r in (0.2, 0.5, 0.8):
        rp = (1 / r - r) / 2
        for k in (0.5, 1.0, 3.0):
            f = lambda x: scalar_D(x, k)
            h = 1e-2 * rp
            d1 = (f(rp - 2 * h) - 8 * f(rp - h) + 8 * f(rp + h) - f(rp + 2 * h)) / (12 * h)
            d2 = (-f(rp - 2 * h) + 16 * f(rp - h) - 30 * f(rp) + 16 * f(rp + h) - f(rp + 2 * h)) / (12 * h * h)
            assert reflected_diagonal_on_axis(r, k).d2 == pytest.approx(-d1 - rp * d2, rel=1e-5)


def _diag_entry(r, ks, which):
    out = [reflected_diagonal_on_axis(r, k) for k in ks]
    return np.array([d.d1 if which == 0 else d.d2 for d in out])


@pytest.mark.parametrize("r", [0.3, 0.6, 0.9])
def test_isotropy_after_kappa_integration(r):
    rp = (1 / r - r) / 2
    pref = reflected_diagonal_on_axis(r, 1.0).prefactor
    i1, _ = integrate_semi_infinite(lambda k: pref * _diag_entry(r, k, 0), float(decay_rate(rp)))
    i2, _ = integrate_semi_infinite(lambda k: pref * _diag_entry(r, k, 1), float(decay_rate(rp)))
    assert i1 == pytest.approx(i2, rel=1e-8)


def test_transversality_at_mirror():
    rng = np.random.default_rng(5)
    for k in (0.5, 1.0, 2.0):
        for _ in range(4):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            src = rng.uniform(-0.5, 0.5, 3)
            assert tangential_ratio(n, src, k) <= 1e-6


def test_wrong_jacobian_sign_breaks_transversality():
    # mutation check: +P instead of -P leaves the tangential field doubled
    n = np.array([0.6, 0.8, 0.0])
    r0 = np.array([0.1, -0.3, 0.2])
    G = green_free(n, r0, 1.0) - green_reflected(n, r0, 1.0, on_mirror=True)
    tangential = (np.eye(3) - np.outer(n, n)) @ G
    assert np.max(np.abs(tangential)) / np.max(np.abs(G)) > 0.1


def test_green_total_radial_doubles_at_mirror():
    n = np.array([0.0, 0.0, 1.0])
    r0 = np.array([0.2, 0.1, 0.3])
    G = green_total(n, r0, 1.0)
    np.testing.assert_allclose(G[2], 2 * green_free(n, r0, 1.0)[2], rtol=1e-12)


def test_reflected_is_finite_and_smooth_at_coincidence():
    p = np.array([0.5, 0.6, 0.6]) / np.linalg.norm([0.5, 0.6, 0.6]) * 0.95
    G = green_reflected(p, p, 1.0)
    assert np.all(np.isfinite(G))
    near = green_reflected(p, p + 1e-6, 1.0)
    assert rel(near, G) < 1e-4


@pytest.mark.parametrize("point", [(0.3, 0.4, 0.0), (0.1, -0.2, 0.3), (0.0, 0.0, -0.7)])
def test_off_axis_integrated_kernel_is_isotropic(point):
    for method in ("closed", "quadrature"):
        ev = np.linalg.eigvalsh(integrated_reflected_kernel(point, method))
        assert (ev.max() - ev.min()) / np.max(np.abs(ev)) <= 1e-7


def test_integrated_kernel_paths_agree():
    p = (0.2, 0.5, -0.1)
    assert rel(integrated_reflected_kernel(p, "quadrature"), integrated_reflected_kernel(p, "closed")) <= 1e-10


def test_integrated_free_matches_quadrature():
    r, r0 = np.array([0.2, 0.1, 0.0]), np.array([-0.1, 0.3, 0.2])
    from fisheye_casimir.geometry import mobius_separation

    rate = float(decay_rate(mobius_separation(r, r0)))
    value, _ = integrate_semi_infinite(lambda ks: (ks * ks)[:, None, None] * green_free(r, r0, ks), rate)
    assert rel(value, green_free_integrated(r, r0)) <= 1e-10


def test_magnetic_oracle_free_agreement():
    r, r0 = np.array([0.4, 0.0, 0.0]), np.array([0.1, 0.2, 0.0])
    assert rel(magnetic_green_oracle(r, r0, 1.0), green_free(r, r0, 1.0)) <= 1e-4


def test_magnetic_oracle_reflected_is_minus_electric():
    # the inversion reverses orientation, so the axial magnetic field picks up det P < 0
    r, r0 = np.array([0.4, 0.0, 0.0]), np.array([0.1, 0.2, 0.0])
    gm = magnetic_green_oracle(r, r0, 1.0, "reflected")
    assert rel(gm, -green_reflected(r, r0, 1.0)) <= 1e-4


def test_magnetic_oracle_error_is_stencil_error():
    r, r0 = np.array([0.4, 0.0, 0.0]), np.array([0.1, 0.2, 0.0])
    g = green_free(r, r0, 1.0)
    errs = [rel(magnetic_green_oracle(r, r0, 1.0, "free", FDConfig(4, h)), g) for h in (0.04, 0.02, 0.01)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(np.abs(ratios - 16) < 3)


def test_magnetic_oracle_step_guard():
    with pytest.raises(StepSizeError):
        magnetic_green_oracle([0.4, 0, 0], [0.1, 0.2, 0], 1.0, cfg=FDConfig(4, 0.05), scale=10.0)
