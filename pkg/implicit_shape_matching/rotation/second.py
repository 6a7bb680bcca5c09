"""
Second-order derivatives of the polar rotation.

Coefficients w_{ls,ij} = d w_ij / d q_ls are never stored for all index
quadruples. They are produced per direction: `omega_rate` returns the
derivative of the whole first-order table along one coordinate direction,
which for a unit direction e_ls is the column w_{ls,.} used by the Hessian
assemblies.
"""
from logging import getLogger
from typing import Optional
from typing import Tuple

import numpy as np

from ..kinematics.algebra import cross
from ..kinematics.algebra import hat
from ..kinematics.algebra import skew_vec
from ..kinematics.polar import PolarPair
from ..kinematics.shape import RestShape
from .first import GFactor
from .first import OmegaFirst

LOG = getLogger(__name__)

# Sign of the stretch-rate term in the second-order solve. Tests flip it to
# check that the derivative suites catch a corrupted build.
_STRETCH_RATE_SIGN = -1.0

Index = Tuple[int, int]


def _unit_direction(shape: RestShape, ls: Index) -> np.ndarray:
    direction = np.zeros_like(shape.rest_positions)
    direction[ls] = 1.0
    return direction


def s_derivative(
    shape: RestShape, polar: PolarPair, omega: OmegaFirst, l: int, s: int
) -> np.ndarray:
    """
    Derivative of the stretch factor

    dS/dq_ls = R^T ((m_l / M) e_s q0_l^T - hat(w_ls) R S).

    Parameters
    ----------
    shape : RestShape
        The rest shape.
    polar : PolarPair
        Polar factors of the current covariance.
    omega : OmegaFirst
        First-order coefficients built from `polar`.
    l : int
        Particle index.
    s : int
        Axis index.

    Returns
    -------
    np.ndarray
        The symmetric d x d derivative.

    """
    return stretch_rate(shape, polar, omega, _unit_direction(shape, (l, s)))


def stretch_rate(
    shape: RestShape, polar: PolarPair, omega: OmegaFirst, direction: np.ndarray
) -> np.ndarray:
    """Directional derivative sum_ls direction_ls dS/dq_ls of the stretch."""
    direction = np.asarray(direction, dtype=np.float64)
    a_rate = (
        np.einsum("r,rp,rq->pq", shape.masses, direction, shape.rest_positions)
        / shape.total_mass
    )
    spin = hat(omega.combine(direction), shape.dim)
    return polar.r_mat.T @ (a_rate - spin @ polar.r_mat @ polar.s_mat)


def omega_rate(
    shape: RestShape,
    polar: PolarPair,
    omega: OmegaFirst,
    direction: np.ndarray,
    factor: Optional[GFactor] = None,
    truncated: bool = False,
) -> np.ndarray:
    """
    Directional second-order rotation coefficients

    Differentiates G w_ij = (2 m_i / M) skew(R^T e_j q0_i^T) along the
    coordinate direction q', which gives for every (i, j)

        G w'_ij = -(2 m_i / M) skew(R^T hat(W) e_j q0_i^T)
                  - (tr(S') I - S') R^T w_ij
                  + (tr(S) I - S) R^T (W x w_ij)

    with W = sum_ls q'_ls w_ls and S' the stretch rate. The last term only
    exists in 3D. In 2D G acts as tr(S) and the middle term is tr(S') w_ij.

    Parameters
    ----------
    shape : RestShape
        The rest shape.
    polar : PolarPair
        Polar factors of the current covariance.
    omega : OmegaFirst
        First-order coefficients built from `polar`.
    direction : np.ndarray
        Coordinate direction q' (n x d).
    factor : Optional[GFactor]
        Factorization of G to reuse.
    truncated : bool, default False
        Drop the 3D-only cross-product term.

    Returns
    -------
    np.ndarray
        Table of w'_ij, shape (n, d, 3) in 3D and (n, d) in 2D.

    """
    factor = GFactor(polar) if factor is None else factor
    dim = shape.dim
    spin = omega.combine(direction)
    s_rate = stretch_rate(shape, polar, omega, direction)

    turned = polar.r_mat.T @ hat(spin, dim)
    outer = np.einsum("pj,iq->ijpq", turned, shape.rest_positions)
    rhs = skew_vec(outer)
    rhs = -rhs * (2.0 * shape.mass_fractions).reshape((-1,) + (1,) * (rhs.ndim - 1))

    if dim == 2:
        rhs = rhs + _STRETCH_RATE_SIGN * np.trace(s_rate) * omega.vectors
        return factor.solve(rhs)

    stretch_op = np.trace(s_rate) * np.eye(3) - s_rate
    rhs = rhs + _STRETCH_RATE_SIGN * np.einsum(
        "pq,ijq->ijp", stretch_op @ polar.r_mat.T, omega.vectors
    )
    if not truncated:
        spun = cross(spin, omega.vectors, dim)
        rhs = rhs + np.einsum("pq,ijq->ijp", polar.g_mat, spun)
    return factor.solve(rhs)


def omega_second(
    shape: RestShape,
    polar: PolarPair,
    omega: OmegaFirst,
    ls: Index,
    ij: Index,
    factor: Optional[GFactor] = None,
    truncated: bool = False,
) -> np.ndarray:
    """
    Second-order rotation coefficient

    Returns w_{ls,ij} = d w_ij / d q_ls. The pair exchange satisfies
    w_{ls,ij} - w_{ij,ls} = w_ls x w_ij, which vanishes in 2D.

    Parameters
    ----------
    shape : RestShape
        The rest shape.
    polar : PolarPair
        Polar factors of the current covariance.
    omega : OmegaFirst
        First-order coefficients built from `polar`.
    ls : Tuple[int, int]
        Particle and axis of the differentiation coordinate.
    ij : Tuple[int, int]
        Particle and axis of the first-order coefficient.
    factor : Optional[GFactor]
        Factorization of G to reuse.
    truncated : bool, default False
        Drop the 3D-only cross-product term.

    Returns
    -------
    np.ndarray
        A 3-vector in 3D, a scalar in 2D.

    Raises
    ------
    SingularG
        If G is numerically singular.

    """
    table = omega_rate(
        shape, polar, omega, _unit_direction(shape, ls), factor, truncated
    )
    return table[ij]


def rotation_second_derivative(
    polar: PolarPair,
    omega: OmegaFirst,
    shape: RestShape,
    ls: Index,
    ij: Index,
    q0: np.ndarray,
    factor: Optional[GFactor] = None,
) -> np.ndarray:
    """
    Second derivative of R q0

    d^2(R q0) / dq_ls dq_ij = (hat(w_{ls,ij}) + hat(w_ij) hat(w_ls)) R q0.

    Returns
    -------
    np.ndarray
        The d-vector of the mixed second derivative.

    """
    dim = shape.dim
    second = omega_second(shape, polar, omega, ls, ij, factor)
    rotated = polar.r_mat @ np.asarray(q0, dtype=np.float64)
    curvature = hat(second, dim) + omega.matrices[ij] @ omega.matrices[ls]
    return curvature @ rotated


def rotation_hessian_contract(
    polar: PolarPair,
    omega: OmegaFirst,
    shape: RestShape,
    l: int,
    i: int,
    q0: np.ndarray,
    v: np.ndarray,
    factor: Optional[GFactor] = None,
) -> np.ndarray:
    """
    Contraction of the second derivative of R q0 with a vector

    Entry (a, b) is q0^T R^T (hat(w_lb) hat(w_ia) - hat(w_{lb,ia})) v,
    assembled from the column form of `rotation_second_derivative` and the
    antisymmetry of hat.

    Parameters
    ----------
    polar : PolarPair
        Polar factors of the current covariance.
    omega : OmegaFirst
        First-order coefficients built from `polar`.
    shape : RestShape
        The rest shape.
    l : int
        Particle of the outer derivative (columns).
    i : int
        Particle of the inner derivative (rows).
    q0 : np.ndarray
        Rest-space vector.
    v : np.ndarray
        Vector to contract with.

    Returns
    -------
    np.ndarray
        The d x d contraction.

    """
    factor = GFactor(polar) if factor is None else factor
    dim = shape.dim
    rotated = polar.r_mat @ np.asarray(q0, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros((dim, dim))
    for b in range(dim):
        column = omega_rate(
            shape, polar, omega, _unit_direction(shape, (l, b)), factor
        )[i]
        curvature = hat(column, dim) + omega.matrices[i] @ omega.matrices[l, b]
        out[:, b] = (curvature @ rotated) @ v
    return out


def rotation_hessian_moment(
    polar: PolarPair,
    omega: OmegaFirst,
    shape: RestShape,
    l: int,
    i: int,
    moment: np.ndarray,
    factor: Optional[GFactor] = None,
) -> np.ndarray:
    """
    Rotation Hessian contracted through a moment matrix

    Sums `rotation_hessian_contract` over particles: with the moment
    P = sum_r v_r (R q0_r)^T, entry (a, b) is
    tr((hat(w_lb) hat(w_ia) - hat(w_{lb,ia})) P).

    Returns
    -------
    np.ndarray
        The d x d block.

    """
    factor = GFactor(polar) if factor is None else factor
    dim = shape.dim
    moment = np.asarray(moment, dtype=np.float64)
    out = np.zeros((dim, dim))
    for b in range(dim):
        column = omega_rate(
            shape, polar, omega, _unit_direction(shape, (l, b)), factor
        )[i]
        mixed = omega.matrices[l, b] @ omega.matrices[i] - hat(column, dim)
        out[:, b] = np.einsum("apq,qp->a", mixed, moment)
    return out
