"""Fused force and positional Hessian of potential plus damping."""
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from ..kinematics.shape import KinematicState
from ..kinematics.shape import RestShape
from .blocks import HessianBlocks
from .context import DerivativeContext
from .curvature import HESSIAN_MAX_PARTICLES
from .curvature import check_capacity
from .curvature import rotation_curvature
from .params import EnergyParams
from .potential import gauss_newton_matrix


def total_force(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    context: Optional[DerivativeContext] = None,
) -> np.ndarray:
    """
    Total internal force

    beta m_i qdot_i + sum_r k_r (dd_r/dq_i)^T (d_r + alpha d'_r), the sum of
    the potential gradient and the damping force.

    Returns
    -------
    np.ndarray
        Force table (n x d).

    """
    if context is None:
        context = DerivativeContext.build(state, shape, params)
    combined = context.deviations + params.alpha * context.velocity_deviations
    return params.beta * shape.masses[:, None] * state.velocities + context.project(
        combined
    )


def total_position_hessian(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    gauss_newton: bool = False,
    max_particles: int = HESSIAN_MAX_PARTICLES,
    context: Optional[DerivativeContext] = None,
) -> HessianBlocks:
    """
    Total positional Hessian

    Derivative of `total_force` with respect to the positions at fixed
    velocities. Potential and damping rotation terms share one curvature
    assembly through the moment of d_r + alpha d'_r.

    Parameters
    ----------
    state : KinematicState
        Positions and velocities.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    gauss_newton : bool, default False
        Drop every second derivative of R, which leaves J^T K J.
    max_particles : int, default 4096
        Guard on the particle count of the dense assembly.
    context : Optional[DerivativeContext]
        Derivative context of `state` to reuse.

    Returns
    -------
    HessianBlocks
        The block grid.

    """
    check_capacity(shape.n_particles, max_particles)
    if context is None:
        context = DerivativeContext.build(state, shape, params)
    matrix = gauss_newton_matrix(context)
    if gauss_newton or params.is_linear:
        return HessianBlocks(matrix, shape.dim)

    damped = params.alpha > 0.0 and bool(np.any(state.velocities))
    combined = context.deviations + params.alpha * context.velocity_deviations
    curvature = rotation_curvature(context, context.moment(combined), with_path=damped)
    rotation = curvature.contraction
    if curvature.path is not None:
        stiffness = np.repeat(shape.stiffness, shape.dim)
        rotation = rotation + params.alpha * context.jacobian.T @ (
            stiffness[:, None] * curvature.path
        )
    matrix -= params.rotation_weight * rotation
    return HessianBlocks(matrix, shape.dim)


def mechanical_energy(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    gravity: Optional[ArrayLike] = None,
    context: Optional[DerivativeContext] = None,
) -> float:
    """
    Discrete mechanical energy

    Kinetic energy plus the shape matching potential minus the work potential
    sum_r m_r g . q_r of a uniform gravity field.

    """
    if context is None:
        context = DerivativeContext.build(state, shape, params)
    vel = state.velocities
    kinetic = 0.5 * float(np.sum(shape.masses * np.einsum("rp,rp->r", vel, vel)))
    dev = context.deviations
    potential = 0.5 * float(np.sum(shape.stiffness * np.einsum("rp,rp->r", dev, dev)))
    if gravity is not None:
        g = np.asarray(gravity, dtype=np.float64)
        potential -= float(np.sum(shape.masses * (state.positions @ g)))
    return kinetic + potential
