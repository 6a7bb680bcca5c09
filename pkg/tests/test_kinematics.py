"""Tests for `implicit_shape_matching.kinematics` module."""
import numpy as np
import pytest

from implicit_shape_matching.errors import DegenerateRestShape
from implicit_shape_matching.errors import DimensionMismatch
from implicit_shape_matching.errors import InvalidParticleWeights
from implicit_shape_matching.errors import InvertedOrDegenerate
from implicit_shape_matching.errors import NonFiniteState
from implicit_shape_matching.kinematics import KinematicState
from implicit_shape_matching.kinematics import build_rest_shape
from implicit_shape_matching.kinematics import center_of_mass
from implicit_shape_matching.kinematics import covariance_asym
from implicit_shape_matching.kinematics import hat
from implicit_shape_matching.kinematics import polar_decompose
from implicit_shape_matching.kinematics import skew_vec
from implicit_shape_matching.kinematics.algebra import cross
from implicit_shape_matching.kinematics.polar import POLAR_MAX_ITER
from implicit_shape_matching.kinematics.polar import POLAR_TOLERANCE
from implicit_shape_matching.kinematics.polar import scaled_newton_polar

# Globals
RNG = np.random.default_rng(7)
SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
TETRA = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
MASSES = [1.0, 2.0, 1.0, 1.5]


def rotation_2d(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def test_hat_cross_product():
    w = RNG.normal(size=3)
    x = RNG.normal(size=3)
    assert np.allclose(hat(w) @ x, np.cross(w, x))
    assert np.allclose(hat(w), -hat(w).T)


def test_hat_2d():
    assert np.array_equal(hat(np.array(2.0), dim=2), [[0.0, -2.0], [2.0, 0.0]])


def test_skew_vec_inverts_hat():
    w = RNG.normal(size=(4, 3))
    assert np.allclose(skew_vec(hat(w)), w)
    assert np.allclose(skew_vec(hat(np.array([0.5, -1.5]), dim=2)), [0.5, -1.5])


def test_cross_2d():
    assert cross(np.array(1.5), np.array(-2.0), 2) == 0.0
    assert cross(np.array([1.0, 0.0]), np.array([0.0, 2.0]), 2) == 2.0


def test_build_rest_shape_recenters():
    shape = build_rest_shape(SQUARE, MASSES)
    assert shape.dim == 2
    assert shape.n_particles == 4
    assert shape.total_mass == pytest.approx(5.5)
    assert np.allclose(shape.masses @ shape.rest_positions, 0.0, atol=1e-14)
    assert np.allclose(shape.a_s @ shape.a_s_inv, np.eye(2))
    assert np.all(shape.stiffness == 1.0)


def test_build_rest_shape_is_immutable():
    shape = build_rest_shape(TETRA, MASSES)
    with pytest.raises(ValueError):
        shape.rest_positions[0, 0] = 1.0


def test_build_rest_shape_degenerate():
    with pytest.raises(DegenerateRestShape):
        build_rest_shape([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], [1.0, 1.0, 1.0])
    with pytest.raises(DegenerateRestShape):
        build_rest_shape([[0.0, 0.0], [1.0, 0.0]], [1.0, 1.0])


def test_build_rest_shape_invalid_input():
    with pytest.raises(DimensionMismatch):
        build_rest_shape([[0.0, 0.0], [1.0], [0.0, 1.0]], [1.0, 1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        build_rest_shape(SQUARE, [1.0, 1.0])
    with pytest.raises(InvalidParticleWeights):
        build_rest_shape(SQUARE, [1.0, -1.0, 1.0, 1.0])
    with pytest.raises(InvalidParticleWeights):
        build_rest_shape(SQUARE, [1.0, np.nan, 1.0, 1.0])
    with pytest.raises(InvalidParticleWeights):
        build_rest_shape(SQUARE, MASSES, [1.0, 1.0, -1.0, 1.0])
    with pytest.raises(InvalidParticleWeights):
        build_rest_shape(SQUARE, MASSES, [1.0, 1.0, np.nan, 1.0])


def test_kinematic_state_validation():
    with pytest.raises(NonFiniteState):
        KinematicState(np.array([[np.nan, 0.0]]), np.zeros((1, 2)))
    with pytest.raises(DimensionMismatch):
        KinematicState(np.zeros((3, 2)), np.zeros((3, 3)))
    state = KinematicState.at_rest(SQUARE)
    assert np.array_equal(state.velocities, np.zeros((4, 2)))
    with pytest.raises(DimensionMismatch):
        state.check_against(build_rest_shape(TETRA, MASSES))


def test_covariance_at_rest_equals_rest_covariance():
    shape = build_rest_shape(TETRA, MASSES)
    state = KinematicState.at_rest(np.array(TETRA) + [3.0, -1.0, 2.0])
    assert np.allclose(covariance_asym(state, shape), shape.a_s)
    assert np.allclose(
        center_of_mass(state, shape), np.array(MASSES) @ state.positions / 5.5
    )


@pytest.mark.parametrize("dim", [2, 3])
def test_polar_decompose(dim):
    a = np.eye(dim) + 0.3 * RNG.normal(size=(dim, dim))
    if np.linalg.det(a) < 0:
        a[:, 0] = -a[:, 0]
    polar = polar_decompose(a)
    assert np.allclose(polar.r_mat @ polar.s_mat, a, atol=1e-13)
    assert np.allclose(polar.r_mat.T @ polar.r_mat, np.eye(dim), atol=1e-13)
    assert np.linalg.det(polar.r_mat) == pytest.approx(1.0)
    assert np.allclose(polar.s_mat, polar.s_mat.T, atol=1e-13)
    assert np.all(np.linalg.eigvalsh(polar.s_mat) > 0.0)
    trace = np.trace(polar.s_mat)
    expected = (trace * np.eye(dim) - polar.s_mat) @ polar.r_mat.T
    assert np.allclose(polar.g_mat, expected)


def test_polar_decompose_of_rotation():
    rot = rotation_2d(0.7)
    polar = polar_decompose(2.0 * rot)
    assert np.allclose(polar.r_mat, rot, atol=1e-14)
    assert np.allclose(polar.s_mat, 2.0 * np.eye(2), atol=1e-13)


def test_polar_decompose_is_deterministic():
    a = np.array([[1.2, 0.3, 0.0], [-0.1, 0.9, 0.2], [0.05, 0.0, 1.1]])
    first = polar_decompose(a)
    second = polar_decompose(a.copy())
    assert np.array_equal(first.r_mat, second.r_mat)
    assert np.array_equal(first.s_mat, second.s_mat)


def test_polar_decompose_rejects_inverted():
    with pytest.raises(InvertedOrDegenerate):
        polar_decompose(np.diag([1.0, -1.0]))
    with pytest.raises(InvertedOrDegenerate):
        polar_decompose(np.diag([1.0, 1.0, 0.0]))


def test_scaled_newton_polar_py_func():
    a = np.array([[2.0, 0.5], [-0.3, 1.0]])
    r_mat, iterations, converged = scaled_newton_polar.py_func(
        a, POLAR_TOLERANCE, POLAR_MAX_ITER
    )
    assert converged
    assert 0 < iterations < POLAR_MAX_ITER
    assert np.allclose(r_mat.T @ r_mat, np.eye(2))
    assert np.allclose(r_mat, polar_decompose(a).r_mat)


def test_build_rest_shape_unit_covariance():
    corners = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]
    shape = build_rest_shape(corners, [1.0] * 4)
    assert np.array_equal(np.abs(shape.rest_positions), np.ones((4, 2)))
    assert np.allclose(shape.a_s, np.eye(2))
    collinear = [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [3.0, 3.0, 3.0]]
    with pytest.raises(DegenerateRestShape):
        build_rest_shape(collinear, [1.0] * 4)


def random_rotation(dim, rng):
    q_mat, r_mat = np.linalg.qr(rng.normal(size=(dim, dim)))
    q_mat = q_mat * np.sign(np.diag(r_mat))
    if np.linalg.det(q_mat) < 0.0:
        q_mat[:, 0] = -q_mat[:, 0]
    return q_mat


@pytest.mark.parametrize("dim", [2, 3])
def test_covariance_asym_rigid_equivariance(dim):
    rng = np.random.default_rng(11 + dim)
    shape = build_rest_shape(rng.normal(size=(7, dim)), rng.uniform(0.5, 2.0, 7))
    positions = rng.normal(size=(7, dim))
    rot = random_rotation(dim, rng)
    shift = rng.normal(size=dim)
    a_mat = covariance_asym(KinematicState.at_rest(positions), shape)
    moved = KinematicState.at_rest(positions @ rot.T + shift)
    assert np.allclose(covariance_asym(moved, shape), rot @ a_mat, atol=1e-13)


@pytest.mark.parametrize("dim", [2, 3])
def test_covariance_asym_is_linear_in_positions(dim):
    rng = np.random.default_rng(23 + dim)
    shape = build_rest_shape(rng.normal(size=(6, dim)), rng.uniform(0.5, 2.0, 6))
    first = rng.normal(size=(6, dim))
    second = rng.normal(size=(6, dim))

    def cov(positions):
        return covariance_asym(KinematicState.at_rest(positions), shape)

    blended = cov(2.5 * first - 0.75 * second)
    assert np.allclose(blended, 2.5 * cov(first) - 0.75 * cov(second), atol=1e-12)


@pytest.mark.parametrize("dim", [2, 3])
def test_polar_stretch_matches_eigendecomposition(dim):
    rng = np.random.default_rng(31 + dim)
    for _ in range(10):
        a = np.eye(dim) + 0.25 * rng.normal(size=(dim, dim))
        if np.linalg.det(a) < 0.0:
            a[:, 0] = -a[:, 0]
        eigenvalues, eigenvectors = np.linalg.eigh(a.T @ a)
        stretch = eigenvectors @ np.diag(np.sqrt(eigenvalues)) @ eigenvectors.T
        polar = polar_decompose(a)
        assert np.allclose(polar.s_mat, stretch, atol=1e-12)
        assert np.allclose(polar.r_mat, a @ np.linalg.inv(stretch), atol=1e-12)
