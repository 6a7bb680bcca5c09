"""Rayleigh damping pseudo-potential and its derivatives."""
from logging import getLogger
from typing import Optional
from typing import Tuple

import numpy as np

from ..kinematics.shape import KinematicState
from ..kinematics.shape import RestShape
from .blocks import HessianBlocks
from .context import DerivativeContext
from .curvature import HESSIAN_MAX_PARTICLES
from .curvature import check_capacity
from .curvature import rotation_curvature
from .params import EnergyParams
from .potential import gauss_newton_matrix

LOG = getLogger(__name__)


def _context(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    context: Optional[DerivativeContext],
) -> DerivativeContext:
    if context is None:
        return DerivativeContext.build(state, shape, params)
    return context


def mass_matrix(shape: RestShape) -> np.ndarray:
    """Diagonal of the lumped mass matrix, one entry per coordinate."""
    return np.repeat(shape.masses, shape.dim)


def damping_energy(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    context: Optional[DerivativeContext] = None,
) -> Tuple[float, float, float]:
    """
    Rayleigh damping energies

    Parameters
    ----------
    state : KinematicState
        Positions and velocities.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    context : Optional[DerivativeContext]
        Derivative context of `state` to reuse.

    Returns
    -------
    Tuple[float, float, float]
        The stiffness damping V_da = (alpha/2) sum_r k_r |d'_r|^2, the mass
        damping V_db = (beta/2) sum_r m_r |qdot_r|^2 and their sum V_d.

    """
    context = _context(state, shape, params, context)
    rates = context.velocity_deviations
    v_da = 0.5 * params.alpha * float(
        np.sum(shape.stiffness * np.einsum("rp,rp->r", rates, rates))
    )
    vel = state.velocities
    v_db = 0.5 * params.beta * float(
        np.sum(shape.masses * np.einsum("rp,rp->r", vel, vel))
    )
    return v_da, v_db, v_da + v_db


def damping_force(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    context: Optional[DerivativeContext] = None,
) -> np.ndarray:
    """
    Damping force

    dV_d/dqdot_i = beta m_i qdot_i + alpha sum_r k_r (dd_r/dq_i)^T d'_r.

    """
    context = _context(state, shape, params, context)
    force = params.beta * shape.masses[:, None] * state.velocities
    if params.alpha > 0.0:
        force = force + params.alpha * context.project(context.velocity_deviations)
    return force


def damping_velocity_hessian(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    max_particles: int = HESSIAN_MAX_PARTICLES,
    context: Optional[DerivativeContext] = None,
) -> HessianBlocks:
    """
    Velocity Hessian of the damping energy

    Blocks beta m_i I delta_li + alpha sum_r k_r (dd_r/dq_i)^T dd_r/dq_l. The
    result is symmetric positive semidefinite.

    """
    check_capacity(shape.n_particles, max_particles)
    matrix = np.diag(params.beta * mass_matrix(shape))
    if params.alpha > 0.0:
        context = _context(state, shape, params, context)
        matrix = matrix + params.alpha * gauss_newton_matrix(context)
    return HessianBlocks(matrix, shape.dim)


def damping_position_hessian(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    max_particles: int = HESSIAN_MAX_PARTICLES,
    context: Optional[DerivativeContext] = None,
) -> HessianBlocks:
    """
    Positional Hessian of the damping force

    Derivative of `damping_force` with respect to the positions at fixed
    velocities. Only the stiffness damping depends on the positions, and only
    through the rotation branch:

        -alpha (1 - gamma) sum_r k_r ((d^2 R q0_r / dq_l dq_i)^T d'_r
                                      + (dd_r/dq_i)^T w_r,l)

    where w_r,l = d/dq_l (sum_j (dR q0_r/dq_j) qdot_j). The matrix is not
    symmetric in general.

    Parameters
    ----------
    state : KinematicState
        Positions and velocities.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    max_particles : int, default 4096
        Guard on the particle count of the dense assembly.
    context : Optional[DerivativeContext]
        Derivative context of `state` to reuse.

    Returns
    -------
    HessianBlocks
        The block grid, zero for gamma = 1, alpha = 0 or zero velocities.

    """
    check_capacity(shape.n_particles, max_particles)
    size = shape.n_particles * shape.dim
    if params.is_linear or params.alpha == 0.0 or not np.any(state.velocities):
        return HessianBlocks(np.zeros((size, size)), shape.dim)
    context = _context(state, shape, params, context)
    curvature = rotation_curvature(
        context, context.moment(context.velocity_deviations), with_path=True
    )
    stiffness = np.repeat(shape.stiffness, shape.dim)
    carried = context.jacobian.T @ (stiffness[:, None] * curvature.path)
    matrix = -params.alpha * params.rotation_weight * (curvature.contraction + carried)
    return HessianBlocks(matrix, shape.dim)
