"""The shape matching potential and its analytic derivatives."""
from logging import getLogger
from typing import Optional

import numpy as np

from ..kinematics.algebra import rotate_coefficients
from ..kinematics.polar import PolarPair
from ..kinematics.shape import KinematicState
from ..kinematics.shape import RestShape
from ..kinematics.shape import center_of_mass
from ..kinematics.shape import covariance_asym
from ..rotation.first import OmegaFirst
from .blocks import EnergyReport
from .blocks import HessianBlocks
from .context import DerivativeContext
from .context import blend_matrix
from .context import linear_weights
from .curvature import HESSIAN_MAX_PARTICLES
from .curvature import check_capacity
from .curvature import rotation_curvature
from .params import EnergyParams

LOG = getLogger(__name__)


def deviations(
    state: KinematicState, shape: RestShape, params: EnergyParams, polar: PolarPair
) -> np.ndarray:
    """
    Goal deviations

    d_r = q_r - B q0_r - t with the blend B = gamma A_a A_s^-1 + (1 - gamma) R.

    Parameters
    ----------
    state : KinematicState
        Current positions.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    polar : PolarPair
        Polar factors of covariance_asym(state, shape).

    Returns
    -------
    np.ndarray
        One deviation per particle (n x d).

    """
    covariance = covariance_asym(state, shape)
    blend = blend_matrix(shape, params, covariance, polar)
    return (
        state.positions - shape.rest_positions @ blend.T - center_of_mass(state, shape)
    )


def energy(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    context: Optional[DerivativeContext] = None,
) -> float:
    """
    Shape matching potential V = 1/2 sum_r k_r |d_r|^2.

    Raises
    ------
    InvertedOrDegenerate
        If the covariance of `state` has no proper polar factor.

    """
    if context is None:
        context = DerivativeContext.build(state, shape, params)
    dev = context.deviations
    return 0.5 * float(np.sum(shape.stiffness * np.einsum("rp,rp->r", dev, dev)))


def deviation_jacobian(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    polar: PolarPair,
    omega: OmegaFirst,
    r: int,
    i: int,
) -> np.ndarray:
    """
    Deviation Jacobian block

    dd_r/dq_i = (delta_ri - m_i/M - gamma (m_i/M) q0_i^T A_s^-1 q0_r) I
    - (1 - gamma) dR q0_r / dq_i.

    Parameters
    ----------
    state : KinematicState
        Current positions.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    polar : PolarPair
        Polar factors of the current covariance.
    omega : OmegaFirst
        First-order rotation coefficients built from `polar`.
    r : int
        Particle of the deviation.
    i : int
        Particle of the coordinates.

    Returns
    -------
    np.ndarray
        The d x d block.

    """
    state.check_against(shape)
    weight = linear_weights(shape, params)[r, i]
    block = weight * np.eye(shape.dim)
    rotated = polar.r_mat @ shape.rest_positions[r]
    columns = rotate_coefficients(omega.vectors[i], rotated, shape.dim)
    return block - params.rotation_weight * columns.T


def gradient(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    context: Optional[DerivativeContext] = None,
) -> EnergyReport:
    """
    Potential gradient

    grad_i V = sum_r k_r (dd_r/dq_i)^T d_r, evaluated without forming the
    deviation Jacobian.

    Parameters
    ----------
    state : KinematicState
        Current positions (velocities fill the velocity deviations).
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    context : Optional[DerivativeContext]
        Context of `state` to reuse.

    Returns
    -------
    EnergyReport
        Value, gradient, deviations and velocity deviations.

    """
    if context is None:
        context = DerivativeContext.build(state, shape, params)
    dev = context.deviations
    value = 0.5 * float(np.sum(shape.stiffness * np.einsum("rp,rp->r", dev, dev)))
    return EnergyReport(
        value=value,
        gradient=context.project(dev),
        deviations=dev,
        velocity_deviations=context.velocity_deviations,
    )


def gauss_newton_matrix(context: DerivativeContext) -> np.ndarray:
    """J^T K J with the dense deviation Jacobian J and K = diag(k_r)."""
    jac = context.jacobian
    stiffness = np.repeat(context.shape.stiffness, context.dim)
    return jac.T @ (stiffness[:, None] * jac)


def hessian(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    gauss_newton: bool = False,
    max_particles: int = HESSIAN_MAX_PARTICLES,
    context: Optional[DerivativeContext] = None,
) -> HessianBlocks:
    """
    Potential Hessian

    H_li = sum_r k_r (-(1 - gamma) (d^2 R q0_r / dq_l dq_i)^T d_r
    + (dd_r/dq_i)^T dd_r/dq_l). The Gauss-Newton variant keeps the second
    term only.

    Parameters
    ----------
    state : KinematicState
        Current positions.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    gauss_newton : bool, default False
        Drop the second derivatives of R.
    max_particles : int, default 4096
        Guard on the particle count of the dense assembly.
    context : Optional[DerivativeContext]
        Context of `state` to reuse.

    Returns
    -------
    HessianBlocks
        The symmetric block grid.

    Raises
    ------
    CapacityExceeded
        If the cloud has more than `max_particles` particles.

    """
    check_capacity(shape.n_particles, max_particles)
    if context is None:
        context = DerivativeContext.build(state, shape, params)
    matrix = gauss_newton_matrix(context)
    if not (gauss_newton or params.is_linear):
        curvature = rotation_curvature(context, context.moment(context.deviations))
        matrix -= params.rotation_weight * curvature.contraction
    return HessianBlocks(matrix, shape.dim)
