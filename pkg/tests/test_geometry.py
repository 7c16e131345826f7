import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from fisheye_casimir.errors import DomainError
from fisheye_casimir.geometry import (
    MediumParams,
    image_point,
    inversion_jacobian,
    mobius_separation,
    on_axis_separation,
    refractive_index,
)

inside = st.lists(st.floats(-0.55, 0.55), min_size=3, max_size=3).map(np.array)


@pytest.mark.parametrize("r, expected", [(0.0, 2.0), (1.0, 1.0), (0.5, 1.6)])
def test_refractive_index(r, expected):
    assert refractive_index(r) == pytest.approx(expected, rel=1e-15)


def test_refractive_index_scales_with_params():
    assert refractive_index(1.0, MediumParams(a=2.0, n1=3.0)) == pytest.approx(6.0 / 1.25)


def test_refractive_index_domain():
    with pytest.raises(DomainError):
        refractive_index(-0.1)


def test_refractive_index_strictly_decreasing():
    n = refractive_index(np.linspace(0, 1, 200))
    assert np.all(np.diff(n) < 0)


@pytest.mark.parametrize("kw", [{"a": 0.0}, {"n1": -1.0}, {"a": float("nan")}])
def test_medium_params_validation(kw):
    with pytest.raises(DomainError):
        MediumParams(**kw)


def test_mobius_examples():
    p = np.array([0.3, -0.2, 0.1])
    assert mobius_separation(p, p) == 0.0
    assert mobius_separation([0.5, 0, 0], [2.0, 0, 0]) == pytest.approx(0.75, rel=1e-15)
    assert mobius_separation([0.5, 0, 0], [0, 0, 0]) == 0.5


@settings(max_examples=50)
@given(inside, inside)
def test_mobius_symmetric(a, b):
    assert mobius_separation(a, b) == mobius_separation(b, a)


@settings(max_examples=50)
@given(inside, inside, st.integers(0, 2**31))
def test_mobius_rotation_invariant(a, b, seed):
    R = Rotation.random(random_state=seed).as_matrix()
    assert mobius_separation(R @ a, R @ b) == pytest.approx(mobius_separation(a, b), abs=1e-14)


@pytest.mark.parametrize("r, expected", [(0.5, 0.75), (0.1, 4.95)])
def test_on_axis_examples(r, expected):
    assert on_axis_separation(r) == pytest.approx(expected, rel=1e-15)


def test_on_axis_vanishes_at_mirror():
    assert 0 < on_axis_separation(1 - 1e-9) < 1e-8


@pytest.mark.parametrize("r", [0.0, 1.0, 1.5, -0.2])
def test_on_axis_domain(r):
    with pytest.raises(DomainError):
        on_axis_separation(r)


@pytest.mark.parametrize("r", np.linspace(0.01, 0.99, 25))
def test_on_axis_equals_mobius_to_image(r):
    p = np.array([r, 0.0, 0.0])
    assert on_axis_separation(r) == pytest.approx(mobius_separation(p, image_point(p)), abs=1e-14)


def test_image_examples():
    np.testing.assert_allclose(image_point([0.5, 0, 0]), [2, 0, 0])
    np.testing.assert_allclose(image_point([0, 1, 0]), [0, 1, 0])
    np.testing.assert_allclose(image_point([0.3, 0.4, 0]), [1.2, 1.6, 0], rtol=1e-15)


@settings(max_examples=50)
@given(inside.filter(lambda p: np.linalg.norm(p) > 1e-3))
def test_image_involution(p):
    np.testing.assert_allclose(image_point(image_point(p)), p, rtol=1e-13, atol=1e-15)


def test_jacobian_examples():
    np.testing.assert_allclose(inversion_jacobian([1.0, 0, 0]), np.diag([-1.0, 1, 1]))
    np.testing.assert_allclose(inversion_jacobian([0.5, 0, 0]), np.diag([-4.0, 4, 4]))


@settings(max_examples=50)
@given(inside.filter(lambda p: np.linalg.norm(p) > 0.05))
def test_jacobian_identities(p):
    P = inversion_jacobian(p)
    rr = p @ p
    np.testing.assert_allclose(P, P.T)
    np.testing.assert_allclose(P.T @ P * rr**2, np.eye(3), atol=1e-14)
    assert np.trace(P) == pytest.approx(1 / rr, rel=1e-14)


def test_jacobian_matches_fd_of_image():
    from fisheye_casimir.numerics import fd_partials

    p = np.array([0.3, -0.2, 0.5])
    J = fd_partials(image_point, p)          # J[k, i] = d image_i / d x_k
    np.testing.assert_allclose(J.T, inversion_jacobian(p), rtol=1e-9)


@pytest.mark.parametrize("fn", [image_point, inversion_jacobian])
def test_centre_has_no_image(fn):
    with pytest.raises(DomainError):
        fn([0.0, 0.0, 0.0])
